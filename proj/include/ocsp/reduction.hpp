#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ocsp/dictatorship.hpp"
#include "ocsp/instance.hpp"
#include "ocsp/label_cover.hpp"

namespace ocsp {

// Function tables for every vertex, keyed by vertex name. Domains are the
// uniform query spaces; an ordering of the reduced variables is read off the
// table values.
struct Assignment {
    std::map<std::string, FiniteFunction<long long>> left;
    std::map<std::string, FiniteFunction<long long>> right;
};

// Canonical reduced-variable identifier: vertex name plus the query point
// rendered as alphabet letters, e.g. "u0[1,0,2]". Mixture parts over the
// same alphabets produce identical names, so overlays align by construction.
std::string reduced_variable_name(const std::string& vertex,
                                  const std::vector<long long>& point);

// One mixture part of a reduction. Parts must share block shapes and
// alphabets; weights are normalized over the mixture.
struct ReductionComponent {
    BaseDistribution base;
    OrderingPredicate pred;
    Rational weight = Rational(1);
};

// Materialized reduction: variables (U x Q1^L) then (V x Q2^R); one weighted
// constraint per edge, mixture part, and positive-mass query configuration,
// with the t prefix-column variables of the left vertex first. The cap
// bounds both the variable count and the constraint count.
OcspInstance reduce_lc_mixture(const LabelCoverInstance& lc,
                               const std::vector<ReductionComponent>& components,
                               const Rational& gamma, long long cap = 1LL << 20);

OcspInstance reduce_lc(const LabelCoverInstance& lc, const BaseDistribution& base,
                       const Rational& gamma, const OrderingPredicate& pred,
                       long long cap = 1LL << 20);

// Streamed form of the same constraint distribution: pick a mixture part by
// weight, an edge by weight, one dictatorship-test draw; variables are named
// as in the materialized instance.
struct SampledConstraint {
    const OrderingPredicate* pred = nullptr;
    std::vector<std::string> vars;
};
using ConstraintSampler = std::function<SampledConstraint(Rng&)>;

ConstraintSampler reduce_lc_sampler(const LabelCoverInstance& lc,
                                    const std::vector<ReductionComponent>& components,
                                    const Rational& gamma);

// Composes a constraint sampler with a rank lookup, for Monte-Carlo value of
// a fixed ordering. Throws UnrankedVariable on a missing name.
RankedSampler ranked_sampler(ConstraintSampler sampler, Ordering ord);

// Equal-weight mixture over j in {1,2,3} of the pairwise-independent triple
// with the sum landing on coordinate j, paired with the not-middle-in-slot-j
// predicate.
std::vector<ReductionComponent> overlay_nbtw_components(int q);
OcspInstance overlay_nbtw(const LabelCoverInstance& lc, int q, const Rational& gamma,
                          long long cap = 1LL << 20);
ConstraintSampler overlay_nbtw_sampler(const LabelCoverInstance& lc, int q,
                                       const Rational& gamma);

// Projection tables f_u(x) = x_{lambda(u)}, g_v(y) = y_{lambda(v)} over the
// given alphabets.
Assignment dictator_assignment(const LabelCoverInstance& lc, const Labeling& lambda,
                               const std::vector<long long>& q1,
                               const std::vector<long long>& q2);

// Ranks of every reduced variable read off the assignment tables.
Ordering assignment_ordering(const LabelCoverInstance& lc, const Assignment& asg,
                             const std::vector<long long>& q1,
                             const std::vector<long long>& q2);

// Gadget compilation: every constraint must be a width-3 not-middle
// predicate (any slot convention) on three distinct variables. Each becomes
// two fresh vertices a, b and the six arcs b->x, x->a, a->z, z->b, b->y,
// y->a at one sixth of the constraint weight, where z is the variable the
// predicate keeps out of the middle.
OcspInstance nbtw_to_mas(const OcspInstance& inst);

// Influence decoding: per vertex, bucket its table, pick a bucket uniformly,
// pick label l with probability gamma times the noisy influence of the
// bucket indicator at l, and fall back to label 0 on the leftover mass.
Labeling decode_labeling(const Assignment& asg, const LabelCoverInstance& lc, int buckets,
                         const Rational& gamma, Rng& rng);

// Per-label mass of the decoder's influence branch for one table:
// (gamma / buckets) * sum over buckets of the indicator's noisy influence.
std::vector<Rational> decode_branch_distribution(const FiniteFunction<long long>& table,
                                                 int buckets, const Rational& gamma);

// Exact probability that the influence branches alone satisfy a random edge:
// weighted over edges, (gamma/buckets)^2 times the summed cross influence of
// all bucket-indicator pairs. The decoder's fallback can only add agreement
// on top of this.
Rational decode_agreement_bound(const Assignment& asg, const LabelCoverInstance& lc,
                                int buckets, const Rational& gamma);

}  // namespace ocsp
