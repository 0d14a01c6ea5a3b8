#include "ocsp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ocsp {

double lp_norm(const FiniteFunction<double>& f, double p) {
    if (!(p > 0)) throw BadParameter("norm exponent must be positive");
    const auto masses = f.space.mass_table();
    double total = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        total += to_double(masses[i]) * std::pow(std::fabs(f.values[i]), p);
    return std::pow(total, 1.0 / p);
}

double hc_delta(double gamma, double alpha) {
    if (!(alpha > 0) || alpha > 0.5)
        throw BadParameter("minimum atom mass must lie in (0, 1/2]");
    if (!(gamma > 0) || gamma >= 1) throw BadParameter("noise rate must lie in (0, 1)");
    if (alpha == 0.5) {
        if (gamma >= 0.5)
            throw BadParameter("noise rate must be below 1/2 when the minimum atom is 1/2");
        return gamma * (2 - gamma) / ((1 - gamma) * (1 - gamma));
    }
    const double A = (1 - alpha) / alpha;
    if (gamma >= 1 - 1 / std::sqrt(A))
        throw BadParameter("noise rate outside the exponent formula's validity range");
    return 2 * (std::log(1 / ((1 - gamma) * (1 - gamma))) - 1) / std::log(A);
}

double hc_delta_exact(double gamma, double alpha) {
    if (!(alpha > 0) || alpha > 0.5)
        throw BadParameter("minimum atom mass must lie in (0, 1/2]");
    if (!(gamma > 0) || gamma >= 1) throw BadParameter("noise rate must lie in (0, 1)");
    const double rho2 = (1 - gamma) * (1 - gamma);
    if (alpha == 0.5) return (1 - rho2) / rho2;
    const double A = (1 - alpha) / alpha;
    return 2 * std::log(A) / std::log((1 + rho2 * A) / (1 + rho2 / A)) - 2;
}

HcReport verify_hc(const FiniteFunction<Rational>& f, double gamma) {
    HcReport report;
    report.gamma = gamma;
    report.alpha = to_double(f.space.min_atom());
    report.delta = hc_delta(gamma, report.alpha);
    report.delta_exact = hc_delta_exact(gamma, report.alpha);
    report.vacuous = report.delta <= 0;

    const FiniteFunction<double> fd = to_double_function(f);
    const FiniteFunction<double> noised = noise_operator(fd, 1 - gamma);
    // A nonpositive closed-form gap degenerates the claim to plain norm
    // contractivity at exponent 2, which is what gets checked then.
    report.lhs = lp_norm(noised, report.vacuous ? 2.0 : 2.0 + report.delta);
    report.lhs_exact = lp_norm(noised, 2.0 + report.delta_exact);
    report.rhs = lp_norm(fd, 2.0);
    report.pass = report.lhs <= report.rhs + 1e-9;
    report.pass_exact = report.lhs_exact <= report.rhs + 1e-9;
    return report;
}

Bucketing bucketize(const FiniteFunction<long long>& f, int buckets) {
    if (buckets < 1) throw BadParameter("bucket count must be positive");
    const long long n = f.space.size();
    if (static_cast<long long>(f.values.size()) != n)
        throw DomainMismatch("value table does not match the domain");
    if (n % buckets != 0) throw DivisibilityError("bucket count must divide the domain size");

    std::vector<long long> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
        if (f.values[a] != f.values[b]) return f.values[a] < f.values[b];
        return a < b;
    });

    Bucketing b{f.space, buckets, std::vector<int>(n, 0), {}};
    b.intervals.resize(buckets);
    const long long block = n / buckets;
    for (long long r = 0; r < n; ++r) {
        const int bucket = static_cast<int>(r / block);
        const long long point = order[r];
        b.index[point] = bucket;
        const long long value = f.values[point];
        if (r % block == 0) {
            b.intervals[bucket].lo = value;
            b.intervals[bucket].hi = value;
        } else {
            b.intervals[bucket].lo = std::min(b.intervals[bucket].lo, value);
            b.intervals[bucket].hi = std::max(b.intervals[bucket].hi, value);
        }
    }
    return b;
}

FiniteFunction<Rational> bucket_indicator(const Bucketing& b, int bucket) {
    if (bucket < 0 || bucket >= b.buckets) throw IndexOutOfRange("bucket index out of range");
    FiniteFunction<Rational> f{b.space, std::vector<Rational>(b.index.size(), Rational(0))};
    for (std::size_t i = 0; i < b.index.size(); ++i)
        if (b.index[i] == bucket) f.values[i] = 1;
    return f;
}

long long interval_overlap_count(const Bucketing& bf, const Bucketing& bg) {
    long long count = 0;
    for (const auto& a : bf.intervals)
        for (const auto& b : bg.intervals)
            if (a.lo <= b.hi && b.lo <= a.hi) ++count;
    return count;
}

namespace {

int alphabet_position(const std::vector<long long>& alphabet, long long value) {
    const auto it = std::lower_bound(alphabet.begin(), alphabet.end(), value);
    return static_cast<int>(it - alphabet.begin());
}

// Joint block marginal must be uniform over the full block domain.
bool block_marginal_uniform(
    const std::vector<std::pair<std::vector<long long>, Rational>>& marginal,
    long long domain_size) {
    if (static_cast<long long>(marginal.size()) != domain_size) return false;
    const Rational expected = frac(1, domain_size);
    for (const auto& [tuple, mass] : marginal)
        if (mass != expected) return false;
    return true;
}

}  // namespace

ExponentChoice choose_pair_exponent(double gamma, int q_a, int q_b) {
    if (q_a < 2 || q_b < 2) throw BadParameter("alphabets need at least two letters");
    if (!(gamma > 0 && gamma < 1)) throw BadParameter("noise rate must lie in (0, 1)");
    const int q_min = std::min(q_a, q_b), q_max = std::max(q_a, q_b);
    const auto try_formula = [&](int q) -> std::optional<double> {
        try {
            return hc_delta(gamma, 1.0 / q);
        } catch (const BadParameter&) {
            return std::nullopt;
        }
    };
    ExponentChoice choice;
    choice.formula_min_alphabet = try_formula(q_min);
    choice.formula_max_alphabet = try_formula(q_max);
    choice.exact_min_alphabet = hc_delta_exact(gamma, 1.0 / q_min);
    choice.exact_max_alphabet = hc_delta_exact(gamma, 1.0 / q_max);
    if (choice.formula_max_alphabet && *choice.formula_max_alphabet > 0) {
        choice.delta_used = *choice.formula_max_alphabet;
    } else {
        choice.formula_vacuous = true;
        choice.delta_used = choice.exact_max_alphabet;
    }
    choice.pair_exponent = choice.delta_used / (2 * (2 + choice.delta_used));
    return choice;
}

PairBoundReport verify_pair_bound(const FiniteFunction<Rational>& F,
                                  const FiniteFunction<Rational>& G,
                                  const BaseDistribution& pair_dist, const Rational& gamma) {
    const int left = pair_dist.t();
    const int right = pair_dist.m() - pair_dist.t();
    const int q1 = static_cast<int>(pair_dist.q1().size());
    const int q2 = static_cast<int>(pair_dist.q2().size());
    if (q1 < 2 || q2 < 2) throw BadParameter("alphabets need at least two letters");
    if (!(F.space == ProductSpace::uniform(left, q1)))
        throw DomainMismatch("F must live on the uniform prefix-block domain");
    if (!(G.space == ProductSpace::uniform(right, q2)))
        throw DomainMismatch("G must live on the uniform suffix-block domain");
    if (gamma <= 0 || gamma >= 1) throw BadParameter("noise rate must lie in (0, 1)");

    for (const auto& v : F.values)
        if (v != 0 && v != 1) throw MeanMismatch("F must be a 0/1 indicator");
    for (const auto& v : G.values)
        if (v != 0 && v != 1) throw MeanMismatch("G must be a 0/1 indicator");
    const Rational mean_f = expectation(F);
    const Rational mean_g = expectation(G);
    if (mean_f != mean_g) throw MeanMismatch("indicator means must match");
    if (mean_f == 0 || mean_f.get_num() != 1)
        throw MeanMismatch("indicator mean must be the reciprocal of an integer");
    const long long buckets = mean_f.get_den().get_si();

    if (!block_marginal_uniform(pair_dist.prefix_marginal(), F.space.size()))
        throw BadParameter("prefix-block marginal must be uniform");
    if (!block_marginal_uniform(pair_dist.suffix_marginal(), G.space.size()))
        throw BadParameter("suffix-block marginal must be uniform");

    // Coordinatewise resampling with uniform marginals factors through the
    // noise operator on each side: E[F G] over the noised pairs equals
    // E over the base pairs of (T_{1-gamma} F)(x) (T_{1-gamma} G)(y).
    const Rational retain = Rational(1) - gamma;
    const FiniteFunction<Rational> tf = noise_operator(F, retain);
    const FiniteFunction<Rational> tg = noise_operator(G, retain);

    PairBoundReport report;
    report.buckets = static_cast<int>(buckets);
    report.gamma = to_double(gamma);
    for (const auto& atom : pair_dist.atoms()) {
        std::vector<int> x(left), y(right);
        for (int c = 0; c < left; ++c) x[c] = alphabet_position(pair_dist.q1(), atom.tuple[c]);
        for (int c = 0; c < right; ++c)
            y[c] = alphabet_position(pair_dist.q2(), atom.tuple[left + c]);
        report.lhs += atom.p * tf.values[F.space.encode(x)] * tg.values[G.space.encode(y)];
    }
    report.lhs_float = to_double(report.lhs);

    const ExponentChoice choice = choose_pair_exponent(to_double(gamma), q1, q2);
    report.delta_min_alphabet = choice.formula_min_alphabet;
    report.delta_max_alphabet = choice.formula_max_alphabet;
    report.delta_exact_min_alphabet = choice.exact_min_alphabet;
    report.delta_exact_max_alphabet = choice.exact_max_alphabet;
    report.delta_used = choice.delta_used;
    report.formula_vacuous = choice.formula_vacuous;
    report.pair_exponent = choice.pair_exponent;
    report.rhs = std::pow(static_cast<double>(buckets), -(1 + report.pair_exponent));
    report.pass = report.lhs_float <= report.rhs + 1e-12;
    return report;
}

}  // namespace ocsp
