#pragma once

#include <vector>

#include "ocsp/errors.hpp"
#include "ocsp/rational.hpp"

namespace ocsp {

// One independent coordinate of a finite product probability space.
struct SpaceFactor {
    int size = 0;
    std::vector<Rational> p;  // one mass per letter, nonnegative, summing to 1
};

// Product of independent finite factors. Points are dense indices in
// row-major order (first coordinate slowest), so index order coincides with
// lexicographic order on tuples. Dense tables are capped at 2^20 points.
class ProductSpace {
public:
    explicit ProductSpace(std::vector<SpaceFactor> factors);

    // n coordinates, each uniform on {0,...,k-1}.
    static ProductSpace uniform(int n, int k);

    int dimension() const { return static_cast<int>(factors_.size()); }
    const SpaceFactor& factor(int i) const;
    const std::vector<SpaceFactor>& factors() const { return factors_; }
    long long size() const { return size_; }
    long long stride(int i) const;

    long long encode(const std::vector<int>& point) const;
    std::vector<int> decode(long long index) const;

    Rational point_mass(long long index) const;
    // Per-point masses in index order.
    std::vector<Rational> mass_table() const;
    // Smallest nonzero single-coordinate mass.
    Rational min_atom() const;

    bool same_shape(const ProductSpace& other) const;
    bool operator==(const ProductSpace& other) const;

private:
    std::vector<SpaceFactor> factors_;
    std::vector<long long> strides_;
    long long size_ = 1;
};

// Dense table of values over a ProductSpace, in index order.
template <typename T>
struct FiniteFunction {
    ProductSpace space;
    std::vector<T> values;
};

inline FiniteFunction<double> to_double_function(const FiniteFunction<Rational>& f) {
    FiniteFunction<double> g{f.space, {}};
    g.values.reserve(f.values.size());
    for (const auto& v : f.values) g.values.push_back(to_double(v));
    return g;
}

}  // namespace ocsp
