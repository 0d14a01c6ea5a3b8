#pragma once

#include <span>
#include <string>
#include <vector>

#include "ocsp/permutation.hpp"
#include "ocsp/rational.hpp"

namespace ocsp {

// Ordering predicate P : S_m -> [0,1], stored as a payoff per permutation
// (indexed by lexicographic rank). Applied to integer tuples with ties by
// averaging over all rankings consistent with the tuple's weak order.
class OrderingPredicate {
public:
    OrderingPredicate(int arity, std::vector<Rational> payoff_by_rank, std::string name);

    // P(u,v) = 1 iff u precedes v.
    static OrderingPredicate mas();
    // P(a,b,c) = 1 iff c falls strictly between a and b.
    static OrderingPredicate btw();
    // P(a,b,c) = 1 iff c is not the middle of the three.
    static OrderingPredicate nbtw();
    // P = 1 iff argument j (1-based) is not the middle. nbtw_coord(3) == nbtw().
    static OrderingPredicate nbtw_coord(int j);
    // Arity 2t; accepts iff both halves carry the same relative order.
    static OrderingPredicate same_order(int t);
    // Accepts exactly the one permutation sigma.
    static OrderingPredicate indicator(const Perm& sigma);
    // 0/1 predicate from an accepting list.
    static OrderingPredicate from_accepting(int arity, const std::vector<Perm>& accepting,
                                            std::string name = "");
    // Resolves "MAS", "BTW", "NBTW", "NBTW_j", "SO_2t".
    static OrderingPredicate by_name(const std::string& name);

    int arity() const { return arity_; }
    const std::string& name() const { return name_; }
    const Rational& payoff(const Perm& p) const;
    const Rational& payoff_by_rank(long long rank) const { return payoff_[rank]; }

    bool is_zero_one() const;
    // Accepting permutations of a 0/1 predicate, lexicographic.
    std::vector<Perm> accepting() const;

    // Payoff of an arbitrary integer tuple: average of payoff(sigma) over all
    // permutations sigma consistent with the weak order of the tuple.
    Rational extended_payoff(std::span<const long long> tuple) const;

    // Expected payoff of a uniformly random permutation, sum(payoff)/m!.
    Rational random_ordering_value() const;

private:
    int arity_;
    std::vector<Rational> payoff_;
    std::string name_;
};

}  // namespace ocsp
