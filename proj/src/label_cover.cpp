#include "ocsp/label_cover.hpp"

#include <string>

#include "ocsp/errors.hpp"

namespace ocsp {

void LabelCoverInstance::validate() const {
    if (L < 1 || R < 1) throw SchemaError("label-set sizes must be positive");
    if (U.empty() || V.empty()) throw SchemaError("both vertex sides must be nonempty");
    if (edges.empty()) throw SchemaError("at least one edge is required");
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        const std::string at = " (edge " + std::to_string(k) + ")";
        if (e.u < 0 || e.u >= static_cast<int>(U.size()))
            throw SchemaError("left endpoint out of range" + at);
        if (e.v < 0 || e.v >= static_cast<int>(V.size()))
            throw SchemaError("right endpoint out of range" + at);
        if (static_cast<int>(e.pi.size()) != R)
            throw SchemaError("projection must be total on the right label set" + at);
        for (int b : e.pi)
            if (b < 0 || b >= L) throw SchemaError("projection value out of range" + at);
        if (e.weight <= 0) throw SchemaError("edge weight must be positive" + at);
    }
}

Rational LabelCoverInstance::weight_total() const {
    Rational total(0);
    for (const auto& e : edges) total += e.weight;
    return total;
}

Rational lc_value(const LabelCoverInstance& lc, const Labeling& lambda) {
    lc.validate();
    if (lambda.left.size() != lc.U.size() || lambda.right.size() != lc.V.size())
        throw BadParameter("labeling shape does not match the vertex sets");
    for (int l : lambda.left)
        if (l < 0 || l >= lc.L) throw BadParameter("left label out of range");
    for (int r : lambda.right)
        if (r < 0 || r >= lc.R) throw BadParameter("right label out of range");
    Rational hit(0);
    for (const auto& e : lc.edges)
        if (e.pi[lambda.right[e.v]] == lambda.left[e.u]) hit += e.weight;
    return hit / lc.weight_total();
}

Rational lc_exact_value(const LabelCoverInstance& lc, long long cap) {
    lc.validate();
    double combos = 1;
    for (std::size_t i = 0; i < lc.V.size(); ++i) {
        combos *= lc.R;
        if (combos > static_cast<double>(cap))
            throw TooLarge("right labeling space exceeds the cap");
    }

    std::vector<int> right(lc.V.size(), 0);
    Rational best(0);
    while (true) {
        // Score per left vertex: each independently takes its best label.
        std::vector<std::vector<Rational>> gain(lc.U.size(),
                                                std::vector<Rational>(lc.L, Rational(0)));
        for (const auto& e : lc.edges) gain[e.u][e.pi[right[e.v]]] += e.weight;
        Rational hit(0);
        for (const auto& row : gain) {
            Rational top(0);
            for (const auto& g : row)
                if (g > top) top = g;
            hit += top;
        }
        if (hit > best) best = hit;

        std::size_t pos = 0;
        while (pos < right.size() && ++right[pos] == lc.R) right[pos++] = 0;
        if (pos == right.size()) break;
    }
    return best / lc.weight_total();
}

GeneratedLc gen_label_cover(int nu, int nv, int labels_left, int labels_right,
                            int edge_count, bool plant, std::uint64_t seed) {
    if (nu < 1 || nv < 1) throw BadParameter("vertex counts must be positive");
    if (labels_left < 1 || labels_right < 1) throw BadParameter("label counts must be positive");
    if (edge_count < 1) throw BadParameter("edge count must be positive");

    GeneratedLc out;
    out.lc.L = labels_left;
    out.lc.R = labels_right;
    for (int i = 0; i < nu; ++i) out.lc.U.push_back("u" + std::to_string(i));
    for (int i = 0; i < nv; ++i) out.lc.V.push_back("v" + std::to_string(i));

    Rng rng(seed);
    out.is_planted = plant;
    out.planted.left.resize(nu, 0);
    out.planted.right.resize(nv, 0);
    if (plant) {
        for (int i = 0; i < nu; ++i)
            out.planted.left[i] = static_cast<int>(rng_below(rng, labels_left));
        for (int i = 0; i < nv; ++i)
            out.planted.right[i] = static_cast<int>(rng_below(rng, labels_right));
    }

    for (int k = 0; k < edge_count; ++k) {
        LabelCoverEdge e;
        e.u = static_cast<int>(rng_below(rng, nu));
        e.v = static_cast<int>(rng_below(rng, nv));
        e.pi.resize(labels_right);
        for (int b = 0; b < labels_right; ++b)
            e.pi[b] = static_cast<int>(rng_below(rng, labels_left));
        if (plant) e.pi[out.planted.right[e.v]] = out.planted.left[e.u];
        out.lc.edges.push_back(std::move(e));
    }
    out.lc.validate();
    return out;
}

}  // namespace ocsp
