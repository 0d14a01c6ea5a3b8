#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocsp/predicate.hpp"
#include "ocsp/rng.hpp"

namespace ocsp {

// Finitely supported distribution over m-tuples split into a prefix block of
// t coordinates over alphabet q1 and a suffix block of m-t coordinates over
// alphabet q2. Alphabets are explicit integer sets.
class BaseDistribution {
public:
    struct Atom {
        std::vector<long long> tuple;
        Rational p;
    };

    BaseDistribution(int t, int m, std::vector<long long> q1, std::vector<long long> q2,
                     std::vector<Atom> atoms);

    // Prefix {-1,q}, suffix [q]^2: x ~ uniform {-1,q}, y2 ~ uniform [q],
    // y3 = y2+1 mod q when x = q, else y2-1 mod q. The betweenness payoff is
    // exactly 1-1/q (only the wraparound pair misses).
    static BaseDistribution btw_base(int q);
    // Uniform pairwise-independent triple: x1,x2 ~ [q], x3 = x1+x2 mod q.
    static BaseDistribution nbtw_base(int q);
    // nbtw_base with coordinate j (1-based) swapped into the third slot, so
    // the sum lands on coordinate j.
    static BaseDistribution nbtw_permuted(int q, int j);
    // Prefix x ~ [q1]^t iid, shift z ~ [q2], suffix y_j = x_j + z mod q2.
    static BaseDistribution so_base(int t, int q1, int q2);
    // Product of the joint prefix marginal and the joint suffix marginal.
    static BaseDistribution decouple(const BaseDistribution& d);

    int t() const { return t_; }
    int m() const { return m_; }
    const std::vector<long long>& q1() const { return q1_; }
    const std::vector<long long>& q2() const { return q2_; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    const std::vector<long long>& alphabet(int coord) const {  // 0-based coordinate
        return coord < t_ ? q1_ : q2_;
    }

    Rational pmf(const std::vector<long long>& tuple) const;
    // Expected extended payoff of pred under this distribution.
    Rational expected_payoff(const OrderingPredicate& pred) const;

    std::vector<long long> sample(Rng& rng) const;

    // Joint prefix marginal as (prefix tuple, mass) pairs, and the suffix
    // distribution conditioned on one prefix.
    std::vector<std::pair<std::vector<long long>, Rational>> prefix_marginal() const;
    std::vector<std::pair<std::vector<long long>, Rational>> suffix_given_prefix(
        const std::vector<long long>& prefix) const;
    std::vector<std::pair<std::vector<long long>, Rational>> suffix_marginal() const;

    // Marginal of a single coordinate as alphabet-indexed masses.
    std::vector<Rational> coordinate_marginal(int coord) const;

private:
    int t_, m_;
    std::vector<long long> q1_, q2_;
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;  // sampling
};

// Outcome of checking a distribution against the dictatorship-test
// preconditions plus the distribution-specific structure.
struct PropertyReport {
    bool pmf_valid = false;                // masses positive, sum exactly 1
    bool alphabets_respected = false;      // every atom entry in its alphabet
    bool uniform_marginals = false;        // every coordinate uniform on its alphabet
    bool suffix_coords_indep_of_prefix = false;  // each suffix coordinate alone
    bool pairwise_independent = false;     // all coordinate pairs independent
    // 1-based suffix pairs whose own joint law is swap-invariant.
    std::vector<std::pair<int, int>> exchangeable_suffix_pairs;
    Rational expected_payoff = Rational(0);
    std::optional<Rational> payoff_lower_bound;  // closed-form bound when known
    std::optional<bool> payoff_bound_ok;   // expected_payoff >= bound
    std::vector<std::string> witnesses;    // human-readable counterexamples

    // Required for the dictatorship test: pmf_valid, alphabets_respected,
    // uniform_marginals, suffix_coords_indep_of_prefix.
    bool required_ok() const {
        return pmf_valid && alphabets_respected && uniform_marginals &&
               suffix_coords_indep_of_prefix;
    }
};

// Checks the test preconditions exactly and, when pred is given, the expected
// payoff. For the named constructions the closed-form payoff bound is filled
// in: 1-1/q for btw_base, 1-3/q for nbtw variants, 1-t^2/(2 q1)-q1/q2 for
// so_base.
PropertyReport verify_distribution(const BaseDistribution& d, const OrderingPredicate* pred,
                                   std::optional<Rational> payoff_lower_bound = std::nullopt);

// Pearson chi-square statistic of n samples against the exact pmf, plus the
// 0.999 quantile of the reference chi-square distribution.
struct ChiSquare {
    double statistic = 0;
    double threshold = 0;
    long long df = 0;
    bool pass = false;
};
ChiSquare sampler_chi_square(const BaseDistribution& d, long long n, std::uint64_t seed);

}  // namespace ocsp
