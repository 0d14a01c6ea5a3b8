#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocsp/rational.hpp"
#include "ocsp/rng.hpp"

namespace ocsp {

// Projection-game edge: labels (l_u, l_v) satisfy it when pi[l_v] == l_u.
struct LabelCoverEdge {
    int u = 0;
    int v = 0;
    std::vector<int> pi;  // size R, entries in [0, L)
    Rational weight = Rational(1);
};

// Bipartite projection game with left label set [L] and right label set [R].
struct LabelCoverInstance {
    int L = 0;
    int R = 0;
    std::vector<std::string> U;
    std::vector<std::string> V;
    std::vector<LabelCoverEdge> edges;

    void validate() const;  // SchemaError on any structural defect
    Rational weight_total() const;
};

struct Labeling {
    std::vector<int> left;   // size |U|, entries in [0, L)
    std::vector<int> right;  // size |V|, entries in [0, R)
};

// Weighted fraction of satisfied edges. BadParameter on out-of-shape labels.
Rational lc_value(const LabelCoverInstance& lc, const Labeling& lambda);

// Exact optimum. Right labelings are exhausted; for each, every left vertex
// independently takes its best label, which is optimal because the objective
// splits as a sum over left vertices once the right side is fixed. The cap
// bounds R^|V|.
Rational lc_exact_value(const LabelCoverInstance& lc, long long cap = 1LL << 24);

struct GeneratedLc {
    LabelCoverInstance lc;
    Labeling planted;  // satisfies every edge when planting was requested
    bool is_planted = false;
};

// edge_count endpoint pairs uniform with replacement, projections uniform.
// With plant, a hidden labeling is drawn first and each projection is patched
// at the hidden right label so the hidden labeling is perfect.
GeneratedLc gen_label_cover(int nu, int nv, int labels_left, int labels_right,
                            int edge_count, bool plant, std::uint64_t seed);

}  // namespace ocsp
