#include "ocsp/predicate.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace ocsp {

OrderingPredicate::OrderingPredicate(int arity, std::vector<Rational> payoff_by_rank,
                                     std::string name)
    : arity_(arity), payoff_(std::move(payoff_by_rank)), name_(std::move(name)) {
    if (arity < 1 || arity > 10) throw BadParameter("predicate arity out of range [1,10]");
    if (static_cast<long long>(payoff_.size()) != factorial(arity))
        throw BadParameter("predicate payoff table must have m! entries");
    for (const auto& p : payoff_)
        if (p < 0 || p > 1) throw BadParameter("predicate payoffs must lie in [0,1]");
}

OrderingPredicate OrderingPredicate::from_accepting(int arity, const std::vector<Perm>& accepting,
                                                    std::string name) {
    std::vector<Rational> payoff(factorial(arity), Rational(0));
    for (const auto& p : accepting) {
        if (static_cast<int>(p.size()) != arity || !is_perm(p))
            throw BadParameter("accepting list entry is not a permutation of the arity");
        payoff[perm_rank(p)] = 1;
    }
    return OrderingPredicate(arity, std::move(payoff), std::move(name));
}

OrderingPredicate OrderingPredicate::mas() {
    return from_accepting(2, {{1, 2}}, "MAS");
}

OrderingPredicate OrderingPredicate::btw() {
    return from_accepting(3, {{1, 3, 2}, {3, 1, 2}}, "BTW");
}

OrderingPredicate OrderingPredicate::nbtw_coord(int j) {
    if (j < 1 || j > 3) throw BadParameter("nbtw_coord: j must be 1..3");
    std::vector<Perm> acc;
    for (const auto& p : all_perms(3))
        if (p[j - 1] != 2) acc.push_back(p);
    return from_accepting(3, acc, "NBTW_" + std::to_string(j));
}

OrderingPredicate OrderingPredicate::nbtw() {
    auto p = nbtw_coord(3);
    return OrderingPredicate(3, std::vector<Rational>(p.payoff_), "NBTW");
}

OrderingPredicate OrderingPredicate::same_order(int t) {
    if (t < 1 || t > 5) throw BadParameter("same_order: t must be 1..5");
    std::vector<Perm> acc;
    for (const auto& p : all_perms(2 * t)) {
        std::vector<long long> left(p.begin(), p.begin() + t);
        std::vector<long long> right(p.begin() + t, p.end());
        if (natural_order_permutation(left) == natural_order_permutation(right))
            acc.push_back(p);
    }
    return from_accepting(2 * t, acc, "SO_" + std::to_string(2 * t));
}

OrderingPredicate OrderingPredicate::indicator(const Perm& sigma) {
    if (!is_perm(sigma)) throw BadParameter("indicator: not a permutation");
    std::string name = "IND_";
    for (int v : sigma) name += std::to_string(v);
    return from_accepting(static_cast<int>(sigma.size()), {sigma}, name);
}

OrderingPredicate OrderingPredicate::by_name(const std::string& name) {
    if (name == "MAS") return mas();
    if (name == "BTW") return btw();
    if (name == "NBTW") return nbtw();
    if (name.rfind("NBTW_", 0) == 0 && name.size() == 6 && name[5] >= '1' && name[5] <= '3')
        return nbtw_coord(name[5] - '0');
    if (name.rfind("SO_", 0) == 0) {
        try {
            int m = std::stoi(name.substr(3));
            if (m >= 2 && m % 2 == 0 && m <= 10) return same_order(m / 2);
        } catch (const std::exception&) {
        }
    }
    throw SchemaError("unknown predicate name '" + name + "'");
}

const Rational& OrderingPredicate::payoff(const Perm& p) const {
    if (static_cast<int>(p.size()) != arity_) throw ArityMismatch("payoff: wrong tuple length");
    return payoff_[perm_rank(p)];
}

bool OrderingPredicate::is_zero_one() const {
    return std::all_of(payoff_.begin(), payoff_.end(),
                       [](const Rational& p) { return p == 0 || p == 1; });
}

std::vector<Perm> OrderingPredicate::accepting() const {
    std::vector<Perm> acc;
    for (long long r = 0; r < static_cast<long long>(payoff_.size()); ++r)
        if (payoff_[r] == 1) acc.push_back(perm_unrank(arity_, r));
    return acc;
}

Rational OrderingPredicate::extended_payoff(std::span<const long long> tuple) const {
    const int m = arity_;
    if (static_cast<int>(tuple.size()) != m)
        throw ArityMismatch("extended_payoff: tuple length " + std::to_string(tuple.size()) +
                            " vs arity " + std::to_string(m));

    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return tuple[a] < tuple[b]; });

    bool distinct = true;
    for (int k = 0; k + 1 < m; ++k)
        if (tuple[idx[k]] == tuple[idx[k + 1]]) {
            distinct = false;
            break;
        }
    if (distinct) {
        Perm sigma(m);
        for (int k = 0; k < m; ++k) sigma[idx[k]] = k + 1;
        return payoff_[perm_rank(sigma)];
    }

    // Blocks of tied positions; block starting at sorted offset s takes ranks s+1..s+size.
    std::vector<std::pair<int, int>> blocks;  // (start offset, size)
    for (int k = 0; k < m;) {
        int e = k;
        while (e < m && tuple[idx[e]] == tuple[idx[k]]) ++e;
        blocks.emplace_back(k, e - k);
        k = e;
    }

    Perm sigma(m);
    Rational sum(0);
    long long count = 1;
    for (auto [start, size] : blocks) {
        (void)start;
        count *= factorial(size);
    }

    std::function<void(size_t)> rec = [&](size_t b) {
        if (b == blocks.size()) {
            sum += payoff_[perm_rank(sigma)];
            return;
        }
        auto [start, size] = blocks[b];
        std::vector<int> ranks(size);
        std::iota(ranks.begin(), ranks.end(), start + 1);
        do {
            for (int k = 0; k < size; ++k) sigma[idx[start + k]] = ranks[k];
            rec(b + 1);
        } while (std::next_permutation(ranks.begin(), ranks.end()));
    };
    rec(0);
    return sum / to_rational(count);
}

Rational OrderingPredicate::random_ordering_value() const {
    Rational sum(0);
    for (const auto& p : payoff_) sum += p;
    return sum / to_rational(factorial(arity_));
}

}  // namespace ocsp
