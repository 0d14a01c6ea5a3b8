#include "ocsp/reduction.hpp"

#include <memory>
#include <utility>

#include "ocsp/errors.hpp"

namespace ocsp {

namespace {

std::vector<long long> point_letters(const ProductSpace& space, long long index,
                                     const std::vector<long long>& alphabet) {
    const std::vector<int> digits = space.decode(index);
    std::vector<long long> letters(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) letters[i] = alphabet[digits[i]];
    return letters;
}

void check_components(const std::vector<ReductionComponent>& components) {
    if (components.empty()) throw BadParameter("a reduction needs at least one mixture part");
    const BaseDistribution& first = components.front().base;
    for (const auto& comp : components) {
        if (comp.base.t() != first.t() || comp.base.m() != first.m() ||
            comp.base.q1() != first.q1() || comp.base.q2() != first.q2())
            throw DomainMismatch("mixture parts must share block shapes and alphabets");
        if (comp.pred.arity() != comp.base.m())
            throw ArityMismatch("mixture predicate arity must match the tuple width");
        if (comp.weight <= 0) throw BadParameter("mixture weights must be positive");
    }
}

Rational component_weight_total(const std::vector<ReductionComponent>& components) {
    Rational total(0);
    for (const auto& comp : components) total += comp.weight;
    return total;
}

const FiniteFunction<long long>& vertex_table(
    const std::map<std::string, FiniteFunction<long long>>& tables, const std::string& vertex) {
    const auto it = tables.find(vertex);
    if (it == tables.end())
        throw BadParameter("assignment is missing a table for vertex " + vertex);
    return it->second;
}

// Noisy influence of every bucket indicator, summed per coordinate.
std::vector<Rational> summed_bucket_influences(const FiniteFunction<long long>& table,
                                               int buckets, const Rational& gamma) {
    if (buckets < 1 || table.space.size() % buckets != 0)
        throw BucketSizeMismatch("bucket count must divide the table size");
    const Bucketing bucketing = bucketize(table, buckets);
    std::vector<Rational> sums(table.space.dimension(), Rational(0));
    for (int a = 0; a < buckets; ++a) {
        const auto inf = noisy_influences(bucket_indicator(bucketing, a), gamma);
        for (std::size_t l = 0; l < sums.size(); ++l) sums[l] += inf[l];
    }
    return sums;
}

}  // namespace

std::string reduced_variable_name(const std::string& vertex,
                                  const std::vector<long long>& point) {
    std::string name = vertex + "[";
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i) name += ",";
        name += std::to_string(point[i]);
    }
    return name + "]";
}

OcspInstance reduce_lc_mixture(const LabelCoverInstance& lc,
                               const std::vector<ReductionComponent>& components,
                               const Rational& gamma, long long cap) {
    lc.validate();
    check_components(components);
    const BaseDistribution& shape = components.front().base;
    const int t = shape.t(), m = shape.m();
    const int q1 = static_cast<int>(shape.q1().size());
    const int q2 = static_cast<int>(shape.q2().size());
    const ProductSpace fspace = ProductSpace::uniform(lc.L, q1);
    const ProductSpace gspace = ProductSpace::uniform(lc.R, q2);

    const double n_vars = static_cast<double>(lc.U.size()) * static_cast<double>(fspace.size()) +
                          static_cast<double>(lc.V.size()) * static_cast<double>(gspace.size());
    if (n_vars > static_cast<double>(cap))
        throw TooLarge("reduced variable set exceeds the cap");

    OcspInstance inst;
    for (const auto& u : lc.U)
        for (long long p = 0; p < fspace.size(); ++p)
            inst.add_variable(reduced_variable_name(u, point_letters(fspace, p, shape.q1())));
    for (const auto& v : lc.V)
        for (long long p = 0; p < gspace.size(); ++p)
            inst.add_variable(reduced_variable_name(v, point_letters(gspace, p, shape.q2())));
    const long long left_block = fspace.size();
    const long long right_base = static_cast<long long>(lc.U.size()) * left_block;
    const long long right_block = gspace.size();

    std::vector<int> pred_index;
    for (const auto& comp : components) pred_index.push_back(inst.add_predicate(comp.pred));

    const Rational edge_total = lc.weight_total();
    const Rational comp_total = component_weight_total(components);

    // The joint query pmf depends only on the mixture part and the edge's
    // projection, so it is cached per distinct projection.
    std::vector<std::map<std::vector<int>, DictTestPmf>> pmf_cache(components.size());

    long long emitted = 0;
    std::vector<int> fpoint(lc.L), gpoint(lc.R);
    for (const auto& edge : lc.edges) {
        for (std::size_t c = 0; c < components.size(); ++c) {
            auto cached = pmf_cache[c].find(edge.pi);
            if (cached == pmf_cache[c].end()) {
                const TestDistribution td(components[c].base, gamma, edge.pi, lc.L);
                cached = pmf_cache[c].emplace(edge.pi, dict_test_pmf(td, cap)).first;
            }
            const DictTestPmf& pmf = cached->second;
            const Rational scale =
                (edge.weight / edge_total) * (components[c].weight / comp_total);
            for (long long idx = 0; idx < static_cast<long long>(pmf.mass.size()); ++idx) {
                const Rational& p = pmf.mass[idx];
                if (p == 0) continue;
                if (++emitted > cap) throw TooLarge("reduced constraint count exceeds the cap");
                const std::vector<int> digits = pmf.domain.decode(idx);
                std::vector<int> vars(m);
                for (int r = 0; r < t; ++r) {
                    for (int l = 0; l < lc.L; ++l) fpoint[l] = digits[pmf.x_cell(l, r)];
                    vars[r] = static_cast<int>(edge.u * left_block + fspace.encode(fpoint));
                }
                for (int col = 0; col < m - t; ++col) {
                    for (int r = 0; r < lc.R; ++r) gpoint[r] = digits[pmf.y_cell(r, col)];
                    vars[t + col] = static_cast<int>(right_base + edge.v * right_block +
                                                     gspace.encode(gpoint));
                }
                inst.add_constraint(std::move(vars), pred_index[c], scale * p);
            }
        }
    }
    return inst;
}

OcspInstance reduce_lc(const LabelCoverInstance& lc, const BaseDistribution& base,
                       const Rational& gamma, const OrderingPredicate& pred, long long cap) {
    return reduce_lc_mixture(lc, {{base, pred, Rational(1)}}, gamma, cap);
}

ConstraintSampler reduce_lc_sampler(const LabelCoverInstance& lc,
                                    const std::vector<ReductionComponent>& components,
                                    const Rational& gamma) {
    lc.validate();
    check_components(components);

    struct State {
        LabelCoverInstance lc;
        std::vector<ReductionComponent> components;
        std::vector<double> comp_cum;
        std::vector<double> edge_cum;
        std::vector<std::vector<TestDistribution>> tds;  // [component][edge]
    };
    auto state = std::make_shared<State>();
    state->lc = lc;
    state->components = components;

    const Rational comp_total = component_weight_total(components);
    Rational run(0);
    for (const auto& comp : components) {
        run += comp.weight;
        state->comp_cum.push_back(to_double(run / comp_total));
    }
    state->comp_cum.back() = 1.0;
    const Rational edge_total = lc.weight_total();
    run = 0;
    for (const auto& edge : lc.edges) {
        run += edge.weight;
        state->edge_cum.push_back(to_double(run / edge_total));
    }
    state->edge_cum.back() = 1.0;
    for (const auto& comp : components) {
        std::vector<TestDistribution> per_edge;
        for (const auto& edge : lc.edges)
            per_edge.emplace_back(comp.base, gamma, edge.pi, lc.L);
        state->tds.push_back(std::move(per_edge));
    }

    const auto pick = [](const std::vector<double>& cum, Rng& rng) {
        const double u = rng_unit(rng);
        for (std::size_t i = 0; i < cum.size(); ++i)
            if (u < cum[i]) return i;
        return cum.size() - 1;
    };

    return [state, pick](Rng& rng) {
        const std::size_t c = pick(state->comp_cum, rng);
        const std::size_t e = pick(state->edge_cum, rng);
        const BaseDistribution& base = state->components[c].base;
        const int t = base.t(), m = base.m();
        const LabelCoverEdge& edge = state->lc.edges[e];
        const DictSample s = dict_test_sample(state->tds[c][e], rng);

        SampledConstraint out;
        out.pred = &state->components[c].pred;
        out.vars.reserve(m);
        std::vector<long long> point;
        for (int r = 0; r < t; ++r) {
            point.clear();
            for (int l = 0; l < state->lc.L; ++l) point.push_back(s.x[l][r]);
            out.vars.push_back(reduced_variable_name(state->lc.U[edge.u], point));
        }
        for (int col = 0; col < m - t; ++col) {
            point.clear();
            for (int r = 0; r < state->lc.R; ++r) point.push_back(s.y[r][col]);
            out.vars.push_back(reduced_variable_name(state->lc.V[edge.v], point));
        }
        return out;
    };
}

RankedSampler ranked_sampler(ConstraintSampler sampler, Ordering ord) {
    auto state = std::make_shared<std::pair<ConstraintSampler, Ordering>>(std::move(sampler),
                                                                          std::move(ord));
    return [state](Rng& rng) {
        const SampledConstraint sc = state->first(rng);
        std::vector<long long> tuple(sc.vars.size());
        for (std::size_t i = 0; i < sc.vars.size(); ++i) {
            const auto it = state->second.ranks.find(sc.vars[i]);
            if (it == state->second.ranks.end())
                throw UnrankedVariable("no rank for variable " + sc.vars[i]);
            tuple[i] = it->second;
        }
        return RankedConstraint{sc.pred, std::move(tuple)};
    };
}

std::vector<ReductionComponent> overlay_nbtw_components(int q) {
    std::vector<ReductionComponent> components;
    for (int j = 1; j <= 3; ++j)
        components.push_back({BaseDistribution::nbtw_permuted(q, j),
                              OrderingPredicate::nbtw_coord(j), Rational(1)});
    return components;
}

OcspInstance overlay_nbtw(const LabelCoverInstance& lc, int q, const Rational& gamma,
                          long long cap) {
    return reduce_lc_mixture(lc, overlay_nbtw_components(q), gamma, cap);
}

ConstraintSampler overlay_nbtw_sampler(const LabelCoverInstance& lc, int q,
                                       const Rational& gamma) {
    return reduce_lc_sampler(lc, overlay_nbtw_components(q), gamma);
}

Assignment dictator_assignment(const LabelCoverInstance& lc, const Labeling& lambda,
                               const std::vector<long long>& q1,
                               const std::vector<long long>& q2) {
    lc.validate();
    if (lambda.left.size() != lc.U.size() || lambda.right.size() != lc.V.size())
        throw BadParameter("labeling shape does not match the vertex sets");
    Assignment asg;
    const ProductSpace fspace = ProductSpace::uniform(lc.L, static_cast<int>(q1.size()));
    const ProductSpace gspace = ProductSpace::uniform(lc.R, static_cast<int>(q2.size()));
    for (std::size_t i = 0; i < lc.U.size(); ++i) {
        const int label = lambda.left[i];
        if (label < 0 || label >= lc.L) throw BadParameter("left label out of range");
        std::vector<long long> values(fspace.size());
        for (long long p = 0; p < fspace.size(); ++p)
            values[p] = q1[fspace.decode(p)[label]];
        asg.left.emplace(lc.U[i], FiniteFunction<long long>{fspace, std::move(values)});
    }
    for (std::size_t i = 0; i < lc.V.size(); ++i) {
        const int label = lambda.right[i];
        if (label < 0 || label >= lc.R) throw BadParameter("right label out of range");
        std::vector<long long> values(gspace.size());
        for (long long p = 0; p < gspace.size(); ++p)
            values[p] = q2[gspace.decode(p)[label]];
        asg.right.emplace(lc.V[i], FiniteFunction<long long>{gspace, std::move(values)});
    }
    return asg;
}

Ordering assignment_ordering(const LabelCoverInstance& lc, const Assignment& asg,
                             const std::vector<long long>& q1,
                             const std::vector<long long>& q2) {
    lc.validate();
    Ordering ord;
    const ProductSpace fspace = ProductSpace::uniform(lc.L, static_cast<int>(q1.size()));
    const ProductSpace gspace = ProductSpace::uniform(lc.R, static_cast<int>(q2.size()));
    for (const auto& u : lc.U) {
        const auto& table = vertex_table(asg.left, u);
        if (!(table.space == fspace))
            throw DomainMismatch("left table does not live on the prefix-query domain");
        for (long long p = 0; p < fspace.size(); ++p)
            ord.ranks[reduced_variable_name(u, point_letters(fspace, p, q1))] = table.values[p];
    }
    for (const auto& v : lc.V) {
        const auto& table = vertex_table(asg.right, v);
        if (!(table.space == gspace))
            throw DomainMismatch("right table does not live on the suffix-query domain");
        for (long long p = 0; p < gspace.size(); ++p)
            ord.ranks[reduced_variable_name(v, point_letters(gspace, p, q2))] = table.values[p];
    }
    return ord;
}

OcspInstance nbtw_to_mas(const OcspInstance& inst) {
    // Which slot each width-3 predicate keeps out of the middle, or -1.
    std::vector<int> banned_slot(inst.predicates().size(), -1);
    for (std::size_t p = 0; p < inst.predicates().size(); ++p) {
        const OrderingPredicate& pred = inst.predicates()[p];
        if (pred.arity() != 3) continue;
        for (int j = 1; j <= 3; ++j) {
            const OrderingPredicate reference = OrderingPredicate::nbtw_coord(j);
            bool equal = true;
            for (long long rank = 0; rank < 6 && equal; ++rank)
                equal = pred.payoff_by_rank(rank) == reference.payoff_by_rank(rank);
            if (equal) {
                banned_slot[p] = j;
                break;
            }
        }
    }

    OcspInstance out;
    for (const auto& name : inst.variables()) out.add_variable(name);
    const int mas = out.add_predicate(OrderingPredicate::mas());

    const auto fresh_variable = [&out](std::string name) {
        while (out.variable_index(name) >= 0) name += "'";
        return out.add_variable(name);
    };

    for (std::size_t k = 0; k < inst.constraints().size(); ++k) {
        const Constraint& c = inst.constraints()[k];
        const int slot = banned_slot[c.pred];
        if (slot < 0)
            throw NotNbtw("constraint " + std::to_string(k) +
                          " is not a width-3 not-middle predicate");
        if (c.vars[0] == c.vars[1] || c.vars[0] == c.vars[2] || c.vars[1] == c.vars[2])
            throw NotNbtw("constraint " + std::to_string(k) + " repeats a variable");
        const int z = c.vars[slot - 1];
        const int x = c.vars[slot == 1 ? 1 : 0];
        const int y = c.vars[slot == 3 ? 1 : 2];
        const int a = fresh_variable("mid_a_" + std::to_string(k));
        const int b = fresh_variable("mid_b_" + std::to_string(k));
        const Rational w = c.weight / 6;
        out.add_constraint({b, x}, mas, w);
        out.add_constraint({x, a}, mas, w);
        out.add_constraint({a, z}, mas, w);
        out.add_constraint({z, b}, mas, w);
        out.add_constraint({b, y}, mas, w);
        out.add_constraint({y, a}, mas, w);
    }
    return out;
}

Labeling decode_labeling(const Assignment& asg, const LabelCoverInstance& lc, int buckets,
                         const Rational& gamma, Rng& rng) {
    lc.validate();
    if (gamma < 0 || gamma > 1) throw BadParameter("noise rate must lie in [0, 1]");
    const double gamma_float = to_double(gamma);

    const auto pick_label = [&](const FiniteFunction<long long>& table, int labels) {
        if (table.space.dimension() != labels)
            throw DomainMismatch("table dimension does not match the label count");
        if (buckets < 1 || table.space.size() % buckets != 0)
            throw BucketSizeMismatch("bucket count must divide the table size");
        const Bucketing bucketing = bucketize(table, buckets);
        const int a = static_cast<int>(rng_below(rng, buckets));
        const auto inf = noisy_influences(bucket_indicator(bucketing, a), gamma);
        const double u = rng_unit(rng);
        double mass = 0;
        for (int l = 0; l < labels; ++l) {
            mass += gamma_float * to_double(inf[l]);
            if (u < mass) return l;
        }
        return 0;  // leftover mass: fixed fallback label
    };

    Labeling out;
    for (const auto& u : lc.U)
        out.left.push_back(pick_label(vertex_table(asg.left, u), lc.L));
    for (const auto& v : lc.V)
        out.right.push_back(pick_label(vertex_table(asg.right, v), lc.R));
    return out;
}

std::vector<Rational> decode_branch_distribution(const FiniteFunction<long long>& table,
                                                 int buckets, const Rational& gamma) {
    if (gamma < 0 || gamma > 1) throw BadParameter("noise rate must lie in [0, 1]");
    std::vector<Rational> mass = summed_bucket_influences(table, buckets, gamma);
    const Rational scale = gamma / buckets;
    for (auto& p : mass) p *= scale;
    return mass;
}

Rational decode_agreement_bound(const Assignment& asg, const LabelCoverInstance& lc,
                                int buckets, const Rational& gamma) {
    lc.validate();
    if (gamma < 0 || gamma > 1) throw BadParameter("noise rate must lie in [0, 1]");

    std::vector<std::vector<Rational>> left_sums, right_sums;
    for (const auto& u : lc.U) {
        const auto& table = vertex_table(asg.left, u);
        if (table.space.dimension() != lc.L)
            throw DomainMismatch("left table dimension does not match the label count");
        left_sums.push_back(summed_bucket_influences(table, buckets, gamma));
    }
    for (const auto& v : lc.V) {
        const auto& table = vertex_table(asg.right, v);
        if (table.space.dimension() != lc.R)
            throw DomainMismatch("right table dimension does not match the label count");
        right_sums.push_back(summed_bucket_influences(table, buckets, gamma));
    }

    Rational agree(0);
    for (const auto& edge : lc.edges) {
        Rational per_edge(0);
        for (int j = 0; j < lc.R; ++j)
            per_edge += left_sums[edge.u][edge.pi[j]] * right_sums[edge.v][j];
        agree += edge.weight * per_edge;
    }
    const Rational branch = gamma / buckets;
    return branch * branch * agree / lc.weight_total();
}

}  // namespace ocsp
