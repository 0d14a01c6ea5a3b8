#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ocsp/instance.hpp"
#include "ocsp/rng.hpp"

namespace ocsp {

enum class SolveMethod { exact, local_search, monte_carlo };

struct SolveReport {
    SolveMethod method = SolveMethod::exact;
    Rational value = Rational(0);  // exact for exact/local_search; MC rounds the mean
    double value_float = 0;
    Ordering best;                 // empty for monte_carlo
    std::uint64_t seed = 0;
    long long samples = 0;         // monte_carlo only
    long long iterations = 0;      // local_search: accepted improving moves
    double ci_halfwidth = -1;      // monte_carlo only; negative means absent
    int workers = 1;
    std::vector<std::string> warnings;
};

// Exhaustive maximum over complete (injective) orderings. For duplicate-free
// constraint tuples some complete ordering always attains the optimum over
// all rank maps; a constraint that repeats a variable can score higher under
// ties. Ties broken toward the lexicographically least arrangement of
// variable indices. Throws TooLarge beyond cap variables. A constraint-free
// instance reports value 1 with a warning.
SolveReport exact_solve(const OcspInstance& inst, int cap = 10);

// First-improvement hill climbing from a seeded random arrangement over
// adjacent transpositions and single-element reinsertions. Value never
// decreases; stops at a local optimum or after max_iters accepted moves.
SolveReport local_search(const OcspInstance& inst, std::uint64_t seed,
                         long long max_iters = 10000);

// One sampled constraint: a predicate and the integer ranks it is applied to.
struct RankedConstraint {
    const OrderingPredicate* pred = nullptr;
    std::vector<long long> tuple;
};

using RankedSampler = std::function<RankedConstraint(Rng&)>;

struct McStats {
    double mean = 0;
    double stddev = 0;
    double ci_halfwidth = 0;  // 3 standard errors
    long long n = 0;
};

// Mean extended payoff of n sampler draws. Shards are seeded with
// derive_seed(seed, k) and merged in shard order, so the result depends only
// on (seed, workers), never on scheduling.
McStats monte_carlo_value(const RankedSampler& sampler, long long n, std::uint64_t seed,
                          int workers = 1);

}  // namespace ocsp
