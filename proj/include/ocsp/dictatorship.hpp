#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ocsp/analysis.hpp"
#include "ocsp/distribution.hpp"
#include "ocsp/predicate.hpp"
#include "ocsp/product_space.hpp"
#include "ocsp/rng.hpp"
#include "ocsp/solvers.hpp"

namespace ocsp {

struct DictSample;

// Query distribution of the dictatorship test along one projection edge:
// left_labels prefix rows i.i.d. from the base, one suffix row per right
// label conditioned on the projected prefix row, then every entry
// independently replaced by a uniform letter of its alphabet with
// probability gamma.
class TestDistribution {
public:
    TestDistribution(BaseDistribution base, Rational gamma, std::vector<int> pi,
                     int left_labels);

    const BaseDistribution& base() const { return base_; }
    const Rational& gamma() const { return gamma_; }
    const std::vector<int>& pi() const { return pi_; }
    int left_labels() const { return left_labels_; }
    int right_labels() const { return static_cast<int>(pi_.size()); }

private:
    friend DictSample dict_test_sample(const TestDistribution& td, Rng& rng);
    BaseDistribution base_;
    Rational gamma_;
    double gamma_float_;
    std::vector<int> pi_;
    int left_labels_;
    // Cumulative tables for sampling; suffix table i matches prefix atom i.
    std::vector<std::pair<std::vector<long long>, double>> prefix_cum_;
    std::vector<std::vector<std::pair<std::vector<long long>, double>>> suffix_cum_;
};

struct DictSample {
    std::vector<std::vector<long long>> x;  // left_labels rows, t alphabet values each
    std::vector<std::vector<long long>> y;  // right_labels rows, m-t values each
};

// One draw; deterministic given the rng state. Entries are resampled in row
// order, x rows before y rows.
DictSample dict_test_sample(const TestDistribution& td, Rng& rng);

// Exact joint mass of every (x, y) configuration. Domain coordinates are
// alphabet positions: first the x cells row-major, then the y cells.
struct DictTestPmf {
    ProductSpace domain;
    std::vector<Rational> mass;
    int left_labels = 0;
    int right_labels = 0;
    int t = 0;
    int m = 0;

    int x_cell(int row, int col) const { return row * t + col; }
    int y_cell(int row, int col) const { return left_labels * t + row * (m - t) + col; }
};

DictTestPmf dict_test_pmf(const TestDistribution& td, long long cap = 1LL << 20);

// Expected extended payoff of pred on the queried values
// (f(x^(1)), ..., f(x^(t)), g(y^(t+1)), ..., g(y^(m))), where query point
// x^(r) is column r of x and y^(j) is column j of y. Exact via dict_test_pmf.
Rational acceptance_probability(const FiniteFunction<long long>& f,
                                const FiniteFunction<long long>& g,
                                const TestDistribution& td, const OrderingPredicate& pred,
                                long long cap = 1LL << 20);

// Sampled counterpart; mean carries a 3-standard-error halfwidth.
McStats acceptance_probability_mc(const FiniteFunction<long long>& f,
                                  const FiniteFunction<long long>& g,
                                  const TestDistribution& td, const OrderingPredicate& pred,
                                  long long samples, std::uint64_t seed, int workers = 1);

// Acceptance with both tables replaced by their bucket structure: each query
// answer becomes an independent uniform member of the answered bucket, and
// the payoff averages over those members.
Rational bucketed_acceptance(const FiniteFunction<long long>& f,
                             const FiniteFunction<long long>& g, const TestDistribution& td,
                             const OrderingPredicate& pred, int buckets,
                             long long cap = 1LL << 20);

struct BucketingLossReport {
    Rational acceptance = Rational(0);
    Rational bucketed = Rational(0);
    Rational lhs = Rational(0);  // |acceptance - bucketed|
    double lhs_float = 0;
    int buckets = 0;
    int m = 0;
    ExponentChoice exponent;
    double rhs = 0;  // m^2 buckets^{-pair_exponent}
    bool pass = false;
};

// Bucketing changes acceptance by at most m^2 Gamma^{-delta}; exact on both
// sides of the comparison. Requires gamma in (0, 1).
BucketingLossReport verify_bucketing_loss(const FiniteFunction<long long>& f,
                                          const FiniteFunction<long long>& g,
                                          const TestDistribution& td,
                                          const OrderingPredicate& pred, int buckets,
                                          long long cap = 1LL << 20);

struct DecouplingReport {
    Rational acceptance = Rational(0);         // under the base distribution
    Rational acceptance_decoupled = Rational(0);
    Rational lhs = Rational(0);                // absolute difference
    double lhs_float = 0;
    double coinf_sqrt_sum = 0;  // sum over bucket pairs of sqrt(cross influence)
    double main_term = 0;       // gamma^{-1/2} m^{1/2} 4^m Gamma^m coinf_sqrt_sum
    double tail_term = 0;       // 2 Gamma^{-pair_exponent} m^2
    int buckets = 0;
    int m = 0;
    ExponentChoice exponent;
    double rhs = 0;
    bool pass = false;
};

// Replacing the base by its decoupled product moves acceptance by at most
// the cross-influence term plus the bucketing tail. Requires gamma in (0, 1).
DecouplingReport verify_decoupling_bound(const FiniteFunction<long long>& f,
                                         const FiniteFunction<long long>& g,
                                         const TestDistribution& td,
                                         const OrderingPredicate& pred, int buckets,
                                         long long cap = 1LL << 20);

}  // namespace ocsp
