#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ocsp/distribution.hpp"
#include "ocsp/product_space.hpp"

namespace ocsp {

namespace detail {
template <typename T>
T weight_cast(const Rational& r);
template <>
inline Rational weight_cast<Rational>(const Rational& r) {
    return r;
}
template <>
inline double weight_cast<double>(const Rational& r) {
    return to_double(r);
}
}  // namespace detail

template <typename T>
T expectation(const FiniteFunction<T>& f) {
    const auto masses = f.space.mass_table();
    T total{};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        total += detail::weight_cast<T>(masses[i]) * f.values[i];
    return total;
}

template <typename T>
T variance(const FiniteFunction<T>& f) {
    const auto masses = f.space.mass_table();
    T mean{}, second{};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const T w = detail::weight_cast<T>(masses[i]);
        mean += w * f.values[i];
        second += w * f.values[i] * f.values[i];
    }
    return second - mean * mean;
}

// Conditional expectation over coordinate `coord`: the result is constant
// along that axis and equals the factor-weighted average of f there.
template <typename T>
FiniteFunction<T> average_out(const FiniteFunction<T>& f, int coord) {
    if (coord < 0 || coord >= f.space.dimension())
        throw IndexOutOfRange("coordinate index out of range");
    const long long stride = f.space.stride(coord);
    const SpaceFactor& fac = f.space.factor(coord);
    FiniteFunction<T> g{f.space, f.values};
    for (long long idx = 0; idx < f.space.size(); ++idx) {
        if ((idx / stride) % fac.size != 0) continue;
        T avg{};
        for (int a = 0; a < fac.size; ++a)
            avg += detail::weight_cast<T>(fac.p[a]) * f.values[idx + a * stride];
        for (int a = 0; a < fac.size; ++a) g.values[idx + a * stride] = avg;
    }
    return g;
}

// T_rho f, applied factor by factor: each axis keeps its value with
// probability rho and is otherwise resampled from its factor distribution.
template <typename T>
FiniteFunction<T> noise_operator(const FiniteFunction<T>& f, const T& rho) {
    if (rho < T(0) || rho > T(1)) throw BadParameter("retention probability must lie in [0,1]");
    FiniteFunction<T> g = f;
    for (int i = 0; i < f.space.dimension(); ++i) {
        FiniteFunction<T> avg = average_out(g, i);
        for (std::size_t j = 0; j < g.values.size(); ++j)
            g.values[j] = rho * g.values[j] + (T(1) - rho) * avg.values[j];
    }
    return g;
}

// All 2^n decomposition parts, indexed by coordinate-set bitmask (bit i =
// coordinate i). Part S is built from conditional expectations by
// inclusion-exclusion; parts sum to f and are pairwise orthogonal.
template <typename T>
std::vector<FiniteFunction<T>> efron_stein(const FiniteFunction<T>& f) {
    const int n = f.space.dimension();
    if (n > 20 || (f.space.size() << n) > (1LL << 24))
        throw TooLarge("decomposition table budget exceeded");
    const std::size_t count = std::size_t{1} << n;
    // cond[mask] = E[f | coordinates in mask], values only.
    std::vector<std::vector<T>> cond(count);
    cond[count - 1] = f.values;
    for (long long mask = static_cast<long long>(count) - 2; mask >= 0; --mask) {
        int missing = 0;
        while ((mask >> missing) & 1) ++missing;
        FiniteFunction<T> parent{f.space, cond[mask | (1LL << missing)]};
        cond[mask] = average_out(parent, missing).values;
    }
    std::vector<FiniteFunction<T>> parts;
    parts.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        FiniteFunction<T> part{f.space, std::vector<T>(f.values.size(), T{})};
        std::size_t sub = s;
        while (true) {
            const bool negate = (__builtin_popcountll(s ^ sub) & 1) != 0;
            for (std::size_t j = 0; j < part.values.size(); ++j) {
                if (negate)
                    part.values[j] -= cond[sub][j];
                else
                    part.values[j] += cond[sub][j];
            }
            if (sub == 0) break;
            sub = (sub - 1) & s;
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

// E over the other coordinates of the variance along `coord`.
template <typename T>
T influence(const FiniteFunction<T>& f, int coord) {
    const FiniteFunction<T> collapsed = average_out(f, coord);
    const auto masses = f.space.mass_table();
    T total{};
    for (std::size_t i = 0; i < f.values.size(); ++i)
        total += detail::weight_cast<T>(masses[i]) *
                 (f.values[i] * f.values[i] - collapsed.values[i] * collapsed.values[i]);
    return total;
}

template <typename T>
T noisy_influence(const FiniteFunction<T>& f, int coord, const T& gamma) {
    const T retain = T(1) - gamma;
    return influence(noise_operator(f, retain), coord);
}

// One noise pass, then the influence of every coordinate.
template <typename T>
std::vector<T> noisy_influences(const FiniteFunction<T>& f, const T& gamma) {
    const T retain = T(1) - gamma;
    const FiniteFunction<T> noised = noise_operator(f, retain);
    std::vector<T> out;
    out.reserve(f.space.dimension());
    for (int i = 0; i < f.space.dimension(); ++i) out.push_back(influence(noised, i));
    return out;
}

template <typename T>
T total_noisy_influence(const FiniteFunction<T>& f, const T& gamma) {
    T total{};
    for (const T& v : noisy_influences(f, gamma)) total += v;
    return total;
}

// Sum over pairs (proj[j], j) of the matched noisy influences. proj maps
// coordinates of g onto coordinates of f.
template <typename T>
T cross_influence(const FiniteFunction<T>& f, const FiniteFunction<T>& g,
                  const std::vector<int>& proj, const T& gamma) {
    if (static_cast<int>(proj.size()) != g.space.dimension())
        throw IndexOutOfRange("projection must cover every coordinate of g");
    const std::vector<T> inf_f = noisy_influences(f, gamma);
    const std::vector<T> inf_g = noisy_influences(g, gamma);
    T total{};
    for (std::size_t j = 0; j < proj.size(); ++j) {
        if (proj[j] < 0 || proj[j] >= f.space.dimension())
            throw IndexOutOfRange("projection target out of range");
        total += inf_f[proj[j]] * inf_g[j];
    }
    return total;
}

double lp_norm(const FiniteFunction<double>& f, double p);
inline double lp_norm(const FiniteFunction<Rational>& f, double p) {
    return lp_norm(to_double_function(f), p);
}

// Exponent gap delta such that ||T_{1-gamma} f||_{2+delta} <= ||f||_2 on any
// product space with minimum atom mass alpha. The alpha = 1/2 branch is
// gamma(2-gamma)(1-gamma)^{-2}; the general branch is
// 2(ln((1-gamma)^{-2}) - 1)/ln A with A = (1-alpha)/alpha, valid for
// gamma < 1 - A^{-1/2}. The returned value can be nonpositive (the closed
// form is vacuous there); callers decide how to handle that.
double hc_delta(double gamma, double alpha);

// Exponent obtained by solving the two-point noise-rate relation
// rho^2 = (A^{2/q} - 1) A / ((A^2 - A^{2/q})) ... for q exactly:
// q - 2 = 2 ln A / ln((1 + rho^2 A)/(1 + rho^2 / A)) - 2, rho = 1 - gamma.
// Positive for every gamma in (0,1); coincides with hc_delta at alpha = 1/2.
double hc_delta_exact(double gamma, double alpha);

struct HcReport {
    double gamma = 0;
    double alpha = 0;         // minimum atom mass of the function's space
    double delta = 0;         // closed-form exponent gap
    double delta_exact = 0;   // solved exponent gap
    bool vacuous = false;     // closed form nonpositive; lhs then uses exponent 2
    double lhs = 0;           // ||T_{1-gamma} f||_{2+delta} (or exponent 2 if vacuous)
    double lhs_exact = 0;     // ||T_{1-gamma} f||_{2+delta_exact}
    double rhs = 0;           // ||f||_2
    bool pass = false;
    bool pass_exact = false;
};

// Numeric check of the noised-norm inequality; alpha is read off the space.
HcReport verify_hc(const FiniteFunction<Rational>& f, double gamma);

// Order-respecting equal-size partition of a function's domain. With ties in
// f the order-respecting invariant weakens to <= across block boundaries;
// ties are broken by point index (= lexicographic order on tuples).
struct Bucketing {
    ProductSpace space;
    int buckets = 0;
    std::vector<int> index;  // point -> bucket
    struct Interval {
        long long lo = 0;
        long long hi = 0;
    };
    std::vector<Interval> intervals;  // minimal covering output interval per bucket
};

Bucketing bucketize(const FiniteFunction<long long>& f, int buckets);

// 0/1 table of the points assigned to one bucket.
FiniteFunction<Rational> bucket_indicator(const Bucketing& b, int bucket);

// Number of bucket pairs whose covering intervals intersect.
long long interval_overlap_count(const Bucketing& bf, const Bucketing& bg);

// Conservative exponent gap for a two-alphabet setting: the closed form is
// evaluated at both alphabet conventions, and the bound is driven by the
// larger-alphabet choice (the smaller delta), falling back to the solved
// exponent when the closed form is unavailable or nonpositive.
struct ExponentChoice {
    std::optional<double> formula_min_alphabet;
    std::optional<double> formula_max_alphabet;
    double exact_min_alphabet = 0;
    double exact_max_alphabet = 0;
    double delta_used = 0;
    bool formula_vacuous = false;
    double pair_exponent = 0;  // delta_used / (2 (2 + delta_used))
};

ExponentChoice choose_pair_exponent(double gamma, int q_a, int q_b);

struct PairBoundReport {
    Rational lhs = Rational(0);  // E[F G] under the noised pair distribution
    double lhs_float = 0;
    int buckets = 0;  // common reciprocal of the indicator means
    double gamma = 0;
    // Closed-form exponents per alphabet convention; unset when gamma falls
    // outside the corresponding validity window.
    std::optional<double> delta_min_alphabet;
    std::optional<double> delta_max_alphabet;
    double delta_exact_min_alphabet = 0;
    double delta_exact_max_alphabet = 0;
    // Conservative exponent driving the bound: the max-alphabet closed form
    // when positive, otherwise the max-alphabet solved exponent.
    double delta_used = 0;
    bool formula_vacuous = false;
    double pair_exponent = 0;  // delta_used / (2 (2 + delta_used))
    double rhs = 0;            // buckets^{-(1 + pair_exponent)}
    bool pass = false;
};

// Exact product bound for a pair of equal-mean indicators under the
// coordinatewise-noised pair distribution. pair_dist couples F's domain
// (prefix block) with G's domain (suffix block); both block marginals must
// be uniform and the indicator means must equal 1/buckets exactly.
PairBoundReport verify_pair_bound(const FiniteFunction<Rational>& F,
                                  const FiniteFunction<Rational>& G,
                                  const BaseDistribution& pair_dist, const Rational& gamma);

}  // namespace ocsp
