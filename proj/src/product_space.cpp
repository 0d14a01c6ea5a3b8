#include "ocsp/product_space.hpp"

#include <string>

namespace ocsp {

namespace {
constexpr long long kTableCap = 1LL << 20;
}

ProductSpace::ProductSpace(std::vector<SpaceFactor> factors) : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
        if (f.size < 1) throw BadParameter("factor size must be at least 1");
        if (static_cast<int>(f.p.size()) != f.size)
            throw BadParameter("factor needs one mass per letter");
        Rational total(0);
        for (const auto& mass : f.p) {
            if (mass < 0) throw BadParameter("factor masses must be nonnegative");
            total += mass;
        }
        if (total != 1) throw BadParameter("factor masses must sum to 1");
        if (size_ > kTableCap / f.size) throw TooLarge("product domain exceeds the dense-table cap");
        size_ *= f.size;
    }
    strides_.assign(factors_.size(), 1);
    for (int i = static_cast<int>(factors_.size()) - 2; i >= 0; --i)
        strides_[i] = strides_[i + 1] * factors_[i + 1].size;
}

ProductSpace ProductSpace::uniform(int n, int k) {
    if (n < 0) throw BadParameter("dimension must be nonnegative");
    if (k < 1) throw BadParameter("alphabet size must be at least 1");
    SpaceFactor f{k, std::vector<Rational>(k, frac(1, k))};
    return ProductSpace(std::vector<SpaceFactor>(n, f));
}

const SpaceFactor& ProductSpace::factor(int i) const {
    if (i < 0 || i >= dimension()) throw IndexOutOfRange("factor index out of range");
    return factors_[i];
}

long long ProductSpace::stride(int i) const {
    if (i < 0 || i >= dimension()) throw IndexOutOfRange("factor index out of range");
    return strides_[i];
}

long long ProductSpace::encode(const std::vector<int>& point) const {
    if (static_cast<int>(point.size()) != dimension())
        throw BadParameter("point dimension does not match the space");
    long long index = 0;
    for (int i = 0; i < dimension(); ++i) {
        if (point[i] < 0 || point[i] >= factors_[i].size)
            throw BadParameter("point entry outside its alphabet");
        index += point[i] * strides_[i];
    }
    return index;
}

std::vector<int> ProductSpace::decode(long long index) const {
    if (index < 0 || index >= size_) throw BadParameter("index outside the domain");
    std::vector<int> point(dimension());
    for (int i = 0; i < dimension(); ++i)
        point[i] = static_cast<int>((index / strides_[i]) % factors_[i].size);
    return point;
}

Rational ProductSpace::point_mass(long long index) const {
    if (index < 0 || index >= size_) throw BadParameter("index outside the domain");
    Rational mass(1);
    for (int i = 0; i < dimension(); ++i)
        mass *= factors_[i].p[(index / strides_[i]) % factors_[i].size];
    return mass;
}

std::vector<Rational> ProductSpace::mass_table() const {
    std::vector<Rational> table{Rational(1)};
    for (const auto& f : factors_) {
        std::vector<Rational> next;
        next.reserve(table.size() * f.size);
        for (const auto& prefix : table)
            for (const auto& mass : f.p) next.push_back(prefix * mass);
        table = std::move(next);
    }
    return table;
}

Rational ProductSpace::min_atom() const {
    Rational best(1);
    for (const auto& f : factors_)
        for (const auto& mass : f.p)
            if (mass > 0 && mass < best) best = mass;
    return best;
}

bool ProductSpace::same_shape(const ProductSpace& other) const {
    if (dimension() != other.dimension()) return false;
    for (int i = 0; i < dimension(); ++i)
        if (factors_[i].size != other.factors_[i].size) return false;
    return true;
}

bool ProductSpace::operator==(const ProductSpace& other) const {
    if (!same_shape(other)) return false;
    for (int i = 0; i < dimension(); ++i)
        if (factors_[i].p != other.factors_[i].p) return false;
    return true;
}

}  // namespace ocsp
