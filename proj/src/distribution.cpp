#include "ocsp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ocsp {

namespace {

std::string tuple_str(const std::vector<long long>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

std::vector<long long> range_alphabet(int q) {
    std::vector<long long> a(q);
    for (int i = 0; i < q; ++i) a[i] = i;
    return a;
}

}  // namespace

BaseDistribution::BaseDistribution(int t, int m, std::vector<long long> q1,
                                   std::vector<long long> q2, std::vector<Atom> atoms)
    : t_(t), m_(m), q1_(std::move(q1)), q2_(std::move(q2)) {
    if (t < 1 || m <= t) throw SchemaError("distribution needs 1 <= t < m");
    auto check_alphabet = [](const std::vector<long long>& a, const char* which) {
        if (a.empty()) throw SchemaError(std::string(which) + " alphabet is empty");
        for (size_t i = 0; i + 1 < a.size(); ++i)
            if (a[i] >= a[i + 1])
                throw SchemaError(std::string(which) + " alphabet must be sorted and duplicate-free");
    };
    check_alphabet(q1_, "prefix");
    check_alphabet(q2_, "suffix");
    std::map<std::vector<long long>, Rational> merged;
    for (auto& a : atoms) {
        if (static_cast<int>(a.tuple.size()) != m)
            throw SchemaError("atom tuple length does not match m");
        if (a.p < 0) throw SchemaError("atom mass must be nonnegative");
        if (a.p == 0) continue;
        merged[a.tuple] += a.p;
    }
    atoms_.reserve(merged.size());
    for (auto& [tuple, p] : merged) atoms_.push_back({tuple, p});

    cumulative_.reserve(atoms_.size());
    Rational total(0);
    for (const auto& a : atoms_) total += a.p;
    double acc = 0;
    double tot = to_double(total);
    for (const auto& a : atoms_) {
        acc += to_double(a.p) / (tot > 0 ? tot : 1.0);
        cumulative_.push_back(acc);
    }
    if (!cumulative_.empty()) cumulative_.back() = 1.0;
}

BaseDistribution BaseDistribution::btw_base(int q) {
    if (q < 2) throw BadParameter("btw_base: q must be >= 2");
    std::vector<Atom> atoms;
    for (long long x : {static_cast<long long>(-1), static_cast<long long>(q)})
        for (long long y2 = 0; y2 < q; ++y2) {
            long long y3 = x == q ? (y2 + 1) % q : (y2 - 1 + q) % q;
            atoms.push_back({{x, y2, y3}, frac(1, 2L * q)});
        }
    return BaseDistribution(1, 3, {-1, q}, range_alphabet(q), std::move(atoms));
}

BaseDistribution BaseDistribution::nbtw_base(int q) {
    if (q < 2) throw BadParameter("nbtw_base: q must be >= 2");
    std::vector<Atom> atoms;
    for (long long x1 = 0; x1 < q; ++x1)
        for (long long x2 = 0; x2 < q; ++x2)
            atoms.push_back({{x1, x2, (x1 + x2) % q}, frac(1, 1L * q * q)});
    return BaseDistribution(1, 3, range_alphabet(q), range_alphabet(q), std::move(atoms));
}

BaseDistribution BaseDistribution::nbtw_permuted(int q, int j) {
    if (j < 1 || j > 3) throw BadParameter("nbtw_permuted: j must be 1..3");
    auto base = nbtw_base(q);
    std::vector<Atom> atoms = base.atoms();
    for (auto& a : atoms) std::swap(a.tuple[j - 1], a.tuple[2]);
    return BaseDistribution(1, 3, base.q1(), base.q2(), std::move(atoms));
}

BaseDistribution BaseDistribution::so_base(int t, int q1, int q2) {
    if (t < 1 || t > 4) throw BadParameter("so_base: t must be 1..4");
    if (q1 < 2 || q2 <= q1) throw BadParameter("so_base: need 2 <= q1 < q2");
    std::vector<Atom> atoms;
    std::vector<long long> x(t);
    long long total = 1;
    for (int i = 0; i < t; ++i) total *= q1;
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        for (int i = 0; i < t; ++i) {
            x[i] = c % q1;
            c /= q1;
        }
        for (long long z = 0; z < q2; ++z) {
            std::vector<long long> tuple(x.begin(), x.end());
            for (int i = 0; i < t; ++i) tuple.push_back((x[i] + z) % q2);
            atoms.push_back({std::move(tuple), frac(1, total * q2)});
        }
    }
    return BaseDistribution(t, 2 * t, range_alphabet(q1), range_alphabet(q2), std::move(atoms));
}

BaseDistribution BaseDistribution::decouple(const BaseDistribution& d) {
    std::vector<Atom> atoms;
    for (const auto& [px, pp] : d.prefix_marginal())
        for (const auto& [sx, sp] : d.suffix_marginal()) {
            std::vector<long long> tuple(px.begin(), px.end());
            tuple.insert(tuple.end(), sx.begin(), sx.end());
            atoms.push_back({std::move(tuple), pp * sp});
        }
    return BaseDistribution(d.t(), d.m(), d.q1(), d.q2(), std::move(atoms));
}

Rational BaseDistribution::pmf(const std::vector<long long>& tuple) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), tuple,
                               [](const Atom& a, const std::vector<long long>& t) {
                                   return a.tuple < t;
                               });
    if (it != atoms_.end() && it->tuple == tuple) return it->p;
    return Rational(0);
}

Rational BaseDistribution::expected_payoff(const OrderingPredicate& pred) const {
    if (pred.arity() != m_) throw ArityMismatch("expected_payoff: predicate arity != m");
    Rational sum(0);
    for (const auto& a : atoms_) sum += a.p * pred.extended_payoff(a.tuple);
    return sum;
}

std::vector<long long> BaseDistribution::sample(Rng& rng) const {
    if (atoms_.empty()) throw BadParameter("sample: empty distribution");
    double u = rng_unit(rng);
    size_t k = std::lower_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin();
    if (k >= atoms_.size()) k = atoms_.size() - 1;
    return atoms_[k].tuple;
}

std::vector<std::pair<std::vector<long long>, Rational>> BaseDistribution::prefix_marginal()
    const {
    std::map<std::vector<long long>, Rational> acc;
    for (const auto& a : atoms_)
        acc[std::vector<long long>(a.tuple.begin(), a.tuple.begin() + t_)] += a.p;
    return {acc.begin(), acc.end()};
}

std::vector<std::pair<std::vector<long long>, Rational>> BaseDistribution::suffix_marginal()
    const {
    std::map<std::vector<long long>, Rational> acc;
    for (const auto& a : atoms_)
        acc[std::vector<long long>(a.tuple.begin() + t_, a.tuple.end())] += a.p;
    return {acc.begin(), acc.end()};
}

std::vector<std::pair<std::vector<long long>, Rational>> BaseDistribution::suffix_given_prefix(
    const std::vector<long long>& prefix) const {
    std::map<std::vector<long long>, Rational> acc;
    Rational total(0);
    for (const auto& a : atoms_) {
        if (!std::equal(prefix.begin(), prefix.end(), a.tuple.begin())) continue;
        acc[std::vector<long long>(a.tuple.begin() + t_, a.tuple.end())] += a.p;
        total += a.p;
    }
    if (total == 0) throw BadParameter("suffix_given_prefix: prefix has zero mass");
    std::vector<std::pair<std::vector<long long>, Rational>> out(acc.begin(), acc.end());
    for (auto& [tuple, p] : out) p /= total;
    return out;
}

std::vector<Rational> BaseDistribution::coordinate_marginal(int coord) const {
    const auto& alpha = alphabet(coord);
    std::vector<Rational> marginal(alpha.size(), Rational(0));
    for (const auto& a : atoms_) {
        auto it = std::lower_bound(alpha.begin(), alpha.end(), a.tuple[coord]);
        if (it == alpha.end() || *it != a.tuple[coord])
            throw DomainMismatch("coordinate " + std::to_string(coord + 1) + " value " +
                                 std::to_string(a.tuple[coord]) + " outside its alphabet");
        marginal[it - alpha.begin()] += a.p;
    }
    return marginal;
}

PropertyReport verify_distribution(const BaseDistribution& d, const OrderingPredicate* pred,
                                   std::optional<Rational> payoff_lower_bound) {
    PropertyReport rep;
    const int m = d.m();
    const int t = d.t();

    Rational total(0);
    rep.pmf_valid = true;
    for (const auto& a : d.atoms()) {
        total += a.p;
        if (a.p <= 0) {
            rep.pmf_valid = false;
            rep.witnesses.push_back("atom " + tuple_str(a.tuple) + " has nonpositive mass " +
                                    format_rational(a.p));
        }
    }
    if (total != 1) {
        rep.pmf_valid = false;
        rep.witnesses.push_back("pmf sums to " + format_rational(total) + ", expected 1");
    }

    rep.alphabets_respected = true;
    for (const auto& a : d.atoms())
        for (int c = 0; c < m; ++c) {
            const auto& alpha = d.alphabet(c);
            if (!std::binary_search(alpha.begin(), alpha.end(), a.tuple[c])) {
                rep.alphabets_respected = false;
                rep.witnesses.push_back("atom " + tuple_str(a.tuple) + " coordinate " +
                                        std::to_string(c + 1) + " outside its alphabet");
            }
        }
    if (!rep.pmf_valid || !rep.alphabets_respected) {
        if (pred) rep.expected_payoff = d.expected_payoff(*pred);
        return rep;
    }

    rep.uniform_marginals = true;
    for (int c = 0; c < m; ++c) {
        const auto& alpha = d.alphabet(c);
        Rational want = frac(1, static_cast<long>(alpha.size()));
        auto marginal = d.coordinate_marginal(c);
        for (size_t v = 0; v < marginal.size(); ++v)
            if (marginal[v] != want) {
                rep.uniform_marginals = false;
                rep.witnesses.push_back("coordinate " + std::to_string(c + 1) + " value " +
                                        std::to_string(alpha[v]) + " has mass " +
                                        format_rational(marginal[v]) + ", expected " +
                                        format_rational(want));
            }
    }

    // Each suffix coordinate alone is independent of the whole prefix block.
    rep.suffix_coords_indep_of_prefix = true;
    auto prefixes = d.prefix_marginal();
    for (int c = t; c < m; ++c) {
        auto marginal = d.coordinate_marginal(c);
        const auto& alpha = d.alphabet(c);
        std::map<std::pair<std::vector<long long>, long long>, Rational> joint;
        for (const auto& a : d.atoms())
            joint[{std::vector<long long>(a.tuple.begin(), a.tuple.begin() + t), a.tuple[c]}] +=
                a.p;
        for (const auto& [px, pp] : prefixes)
            for (size_t v = 0; v < alpha.size(); ++v) {
                Rational got(0);
                auto it = joint.find({px, alpha[v]});
                if (it != joint.end()) got = it->second;
                if (got != pp * marginal[v]) {
                    rep.suffix_coords_indep_of_prefix = false;
                    rep.witnesses.push_back(
                        "suffix coordinate " + std::to_string(c + 1) + " correlates with prefix " +
                        tuple_str(px) + " at value " + std::to_string(alpha[v]));
                }
            }
    }

    rep.pairwise_independent = true;
    for (int c1 = 0; c1 < m && rep.pairwise_independent; ++c1)
        for (int c2 = c1 + 1; c2 < m && rep.pairwise_independent; ++c2) {
            auto m1 = d.coordinate_marginal(c1);
            auto m2 = d.coordinate_marginal(c2);
            const auto& a1 = d.alphabet(c1);
            const auto& a2 = d.alphabet(c2);
            std::map<std::pair<long long, long long>, Rational> joint;
            for (const auto& a : d.atoms()) joint[{a.tuple[c1], a.tuple[c2]}] += a.p;
            for (size_t v1 = 0; v1 < a1.size(); ++v1)
                for (size_t v2 = 0; v2 < a2.size(); ++v2) {
                    Rational got(0);
                    auto it = joint.find({a1[v1], a2[v2]});
                    if (it != joint.end()) got = it->second;
                    if (got != m1[v1] * m2[v2]) {
                        rep.pairwise_independent = false;
                        rep.witnesses.push_back("coordinates " + std::to_string(c1 + 1) + "," +
                                                std::to_string(c2 + 1) +
                                                " are dependent at values (" +
                                                std::to_string(a1[v1]) + "," +
                                                std::to_string(a2[v2]) + ")");
                        break;
                    }
                }
        }

    // Exchangeable suffix pairs: the pair's own joint law, marginalizing out
    // every other coordinate, is invariant under swapping. (The swap may
    // still be visible jointly with the prefix block.)
    for (int c1 = t; c1 < m; ++c1)
        for (int c2 = c1 + 1; c2 < m; ++c2) {
            std::map<std::pair<long long, long long>, Rational> pair_law;
            for (const auto& a : d.atoms()) pair_law[{a.tuple[c1], a.tuple[c2]}] += a.p;
            bool symmetric = true;
            for (const auto& [key, mass] : pair_law) {
                const auto it = pair_law.find({key.second, key.first});
                if (it == pair_law.end() || it->second != mass) {
                    symmetric = false;
                    break;
                }
            }
            if (symmetric) rep.exchangeable_suffix_pairs.emplace_back(c1 + 1, c2 + 1);
        }

    if (pred) {
        rep.expected_payoff = d.expected_payoff(*pred);
        rep.payoff_lower_bound = payoff_lower_bound;
        if (payoff_lower_bound)
            rep.payoff_bound_ok = rep.expected_payoff >= *payoff_lower_bound;
    }
    return rep;
}

namespace {

// 0.999 chi-square quantile via the Wilson-Hilferty cube approximation.
double chi2_quantile_999(long long df) {
    const double z = 3.090232306167813;  // standard normal 0.999 quantile
    double k = static_cast<double>(df);
    double c = 2.0 / (9.0 * k);
    double body = 1.0 - c + z * std::sqrt(c);
    return k * body * body * body;
}

}  // namespace

ChiSquare sampler_chi_square(const BaseDistribution& d, long long n, std::uint64_t seed) {
    if (n <= 0) throw BadParameter("sampler_chi_square: n must be positive");
    Rng rng(seed);
    std::map<std::vector<long long>, long long> counts;
    for (long long i = 0; i < n; ++i) ++counts[d.sample(rng)];
    ChiSquare out;
    out.df = static_cast<long long>(d.atoms().size()) - 1;
    for (const auto& a : d.atoms()) {
        double expect = to_double(a.p) * static_cast<double>(n);
        long long got = 0;
        auto it = counts.find(a.tuple);
        if (it != counts.end()) got = it->second;
        double diff = static_cast<double>(got) - expect;
        out.statistic += diff * diff / expect;
    }
    out.threshold = chi2_quantile_999(out.df);
    out.pass = out.statistic < out.threshold;
    return out;
}

}  // namespace ocsp
