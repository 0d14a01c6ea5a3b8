#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ocsp/analysis.hpp"

using namespace ocsp;

namespace {

// Two-coordinate space with skewed masses, for exercising the non-uniform
// paths: sizes 2 and 3 with masses (1/4, 3/4) and (1/6, 1/3, 1/2).
ProductSpace skewed_space() {
    SpaceFactor a{2, {frac(1, 4), frac(3, 4)}};
    SpaceFactor b{3, {frac(1, 6), frac(1, 3), frac(1, 2)}};
    return ProductSpace({a, b});
}

FiniteFunction<Rational> random_function(const ProductSpace& sp, std::mt19937_64& gen,
                                         int denominator = 64) {
    std::uniform_int_distribution<int> num(0, denominator);
    FiniteFunction<Rational> f{sp, {}};
    f.values.reserve(sp.size());
    for (long long i = 0; i < sp.size(); ++i) f.values.push_back(frac(num(gen), denominator));
    return f;
}

// Oracle: T_rho f by direct summation of the product resampling kernel,
// K_i(x_i -> y_i) = rho [y_i = x_i] + (1 - rho) p_i(y_i).
FiniteFunction<Rational> kernel_noise(const FiniteFunction<Rational>& f, const Rational& rho) {
    const ProductSpace& sp = f.space;
    FiniteFunction<Rational> g{sp, std::vector<Rational>(f.values.size(), Rational(0))};
    for (long long x = 0; x < sp.size(); ++x) {
        const auto px = sp.decode(x);
        Rational acc(0);
        for (long long y = 0; y < sp.size(); ++y) {
            const auto py = sp.decode(y);
            Rational k(1);
            for (int i = 0; i < sp.dimension(); ++i) {
                Rational step = (Rational(1) - rho) * sp.factor(i).p[py[i]];
                if (px[i] == py[i]) step += rho;
                k *= step;
            }
            acc += k * f.values[y];
        }
        g.values[x] = acc;
    }
    return g;
}

FiniteFunction<Rational> dictator(const ProductSpace& sp, int coord) {
    FiniteFunction<Rational> f{sp, {}};
    f.values.reserve(sp.size());
    for (long long i = 0; i < sp.size(); ++i) f.values.push_back(Rational(sp.decode(i)[coord]));
    return f;
}

bool all_zero(const std::vector<Rational>& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0; });
}

bool constant_along_axis(const FiniteFunction<Rational>& f, int coord) {
    const long long stride = f.space.stride(coord);
    const int k = f.space.factor(coord).size;
    for (long long idx = 0; idx < f.space.size(); ++idx) {
        if ((idx / stride) % k != 0) continue;
        for (int a = 1; a < k; ++a)
            if (f.values[idx + a * stride] != f.values[idx]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("noise operator matches the direct kernel expectation") {
    std::mt19937_64 gen(11);
    for (const auto& sp : {ProductSpace::uniform(2, 2), skewed_space()}) {
        for (int rep = 0; rep < 25; ++rep) {
            const auto f = random_function(sp, gen);
            for (const Rational& rho :
                 {Rational(0), frac(1, 10), frac(1, 2), frac(9, 10), Rational(1)}) {
                const auto fast = noise_operator(f, rho);
                const auto slow = kernel_noise(f, rho);
                CHECK(fast.values == slow.values);
            }
        }
    }
}

TEST_CASE("noise operator endpoints, dictator action, and invariants") {
    std::mt19937_64 gen(12);
    const auto sp = ProductSpace::uniform(1, 2);
    const auto f = dictator(sp, 0);

    const auto identity = noise_operator(f, Rational(1));
    CHECK(identity.values == f.values);

    const auto collapsed = noise_operator(f, Rational(0));
    CHECK(collapsed.values[0] == frac(1, 2));
    CHECK(collapsed.values[1] == frac(1, 2));

    const auto third = noise_operator(f, frac(1, 3));
    CHECK(third.values[1] == frac(2, 3));  // rho + (1 - rho)/2
    CHECK(third.values[0] == frac(1, 3));

    for (const auto& space : {ProductSpace::uniform(2, 2), skewed_space()}) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto g = random_function(space, gen);
            for (const Rational& rho : {Rational(0), frac(1, 4), frac(2, 3), Rational(1)}) {
                const auto noised = noise_operator(g, rho);
                CHECK(expectation(noised) == expectation(g));
                CHECK(variance(noised) <= variance(g));
            }
        }
    }

    CHECK_THROWS_AS(noise_operator(f, frac(3, 2)), BadParameter);
    CHECK_THROWS_AS(noise_operator(f, frac(-1, 2)), BadParameter);
}

TEST_CASE("decomposition of constants and dictators") {
    const auto sp = ProductSpace::uniform(2, 3);
    FiniteFunction<Rational> c{sp, std::vector<Rational>(sp.size(), frac(5, 7))};
    const auto parts_c = efron_stein(c);
    REQUIRE(parts_c.size() == 4);
    CHECK(std::all_of(parts_c[0].values.begin(), parts_c[0].values.end(),
                      [](const Rational& r) { return r == frac(5, 7); }));
    for (std::size_t s = 1; s < parts_c.size(); ++s) CHECK(all_zero(parts_c[s].values));

    const auto cube = ProductSpace::uniform(3, 2);
    const auto f = dictator(cube, 0);
    const auto parts = efron_stein(f);
    REQUIRE(parts.size() == 8);
    CHECK(std::all_of(parts[0].values.begin(), parts[0].values.end(),
                      [](const Rational& r) { return r == frac(1, 2); }));
    for (long long i = 0; i < cube.size(); ++i)
        CHECK(parts[1].values[i] == Rational(cube.decode(i)[0]) - frac(1, 2));
    for (std::size_t s = 0; s < parts.size(); ++s) {
        if (s == 0 || s == 1) continue;
        CHECK(all_zero(parts[s].values));
    }
}

TEST_CASE("decomposition is complete, orthogonal, and localized") {
    std::mt19937_64 gen(13);
    for (const auto& sp : {ProductSpace::uniform(2, 3), skewed_space()}) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto f = random_function(sp, gen);
            const auto parts = efron_stein(f);
            const std::size_t count = parts.size();

            FiniteFunction<Rational> total{sp, std::vector<Rational>(sp.size(), Rational(0))};
            for (const auto& part : parts)
                for (long long i = 0; i < sp.size(); ++i) total.values[i] += part.values[i];
            CHECK(total.values == f.values);

            const auto masses = sp.mass_table();
            Rational parseval(0);
            for (std::size_t s = 0; s < count; ++s) {
                for (std::size_t t = 0; t < count; ++t) {
                    Rational inner(0);
                    for (long long i = 0; i < sp.size(); ++i)
                        inner += masses[i] * parts[s].values[i] * parts[t].values[i];
                    if (s == t)
                        parseval += inner;
                    else
                        CHECK(inner == 0);
                }
            }
            FiniteFunction<Rational> sq{sp, {}};
            sq.values.reserve(sp.size());
            for (long long i = 0; i < sp.size(); ++i) sq.values.push_back(f.values[i] * f.values[i]);
            CHECK(parseval == expectation(sq));

            for (std::size_t s = 0; s < count; ++s) {
                // part depends only on the coordinates named by its mask
                for (int i = 0; i < sp.dimension(); ++i)
                    if (!((s >> i) & 1)) CHECK(constant_along_axis(parts[s], i));
                // conditioning on a set that misses part of the mask kills it
                for (std::size_t t = 0; t < count; ++t) {
                    if ((s & ~t) == 0) continue;  // s inside t
                    FiniteFunction<Rational> cond = parts[s];
                    for (int i = 0; i < sp.dimension(); ++i)
                        if (!((t >> i) & 1)) cond = average_out(cond, i);
                    CHECK(all_zero(cond.values));
                }
            }
        }
    }
}

TEST_CASE("influences of dictators are the frozen constants") {
    const auto cube = ProductSpace::uniform(3, 2);
    const auto f = dictator(cube, 0);
    CHECK(influence(f, 0) == frac(1, 4));
    CHECK(influence(f, 1) == 0);
    CHECK(influence(f, 2) == 0);

    const Rational g14 = frac(1, 4);
    CHECK(noisy_influence(f, 0, g14) == frac(9, 64));  // (1-gamma)^2 / 4
    CHECK(noisy_influence(f, 1, g14) == 0);
    CHECK(total_noisy_influence(f, g14) == frac(9, 64));

    const auto line = ProductSpace::uniform(1, 2);
    const auto d1 = dictator(line, 0);
    CHECK(cross_influence(d1, d1, {0}, g14) == frac(81, 4096));

    // g's only influential coordinate projects onto f's influential one.
    const auto left = ProductSpace::uniform(2, 2);
    const auto right = ProductSpace::uniform(3, 2);
    const auto fl = dictator(left, 0);
    const auto gr = dictator(right, 1);
    CHECK(cross_influence(fl, gr, {0, 0, 1}, g14) == frac(81, 4096));
    // mismatched projection: influential coordinates never meet
    CHECK(cross_influence(fl, gr, {1, 1, 1}, g14) == 0);

    CHECK_THROWS_AS(influence(f, 3), IndexOutOfRange);
    CHECK_THROWS_AS(influence(f, -1), IndexOutOfRange);
    CHECK_THROWS_AS(cross_influence(fl, gr, {0, 0}, g14), IndexOutOfRange);
    CHECK_THROWS_AS(cross_influence(fl, gr, {0, 0, 5}, g14), IndexOutOfRange);
}

TEST_CASE("influence bounds hold exactly on random functions") {
    std::mt19937_64 gen(14);
    for (const auto& sp : {ProductSpace::uniform(2, 3), skewed_space()}) {
        for (int rep = 0; rep < 25; ++rep) {
            const auto f = random_function(sp, gen);
            const Rational var = variance(f);
            for (const Rational& gamma : {frac(1, 10), frac(1, 4), frac(1, 2)}) {
                const auto noisy = noisy_influences(f, gamma);
                Rational total(0);
                for (const auto& v : noisy) {
                    CHECK(v <= var);
                    total += v;
                }
                CHECK(gamma * total <= var);
            }
        }
    }
}

TEST_CASE("influence of a product is at most t times the influence sum") {
    std::mt19937_64 gen(15);
    const auto sp = ProductSpace::uniform(2, 2);
    const int t = 3;
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<FiniteFunction<Rational>> fs;
        for (int r = 0; r < t; ++r) fs.push_back(random_function(sp, gen));
        FiniteFunction<Rational> prod{sp, std::vector<Rational>(sp.size(), Rational(1))};
        for (const auto& f : fs)
            for (long long i = 0; i < sp.size(); ++i) prod.values[i] *= f.values[i];
        for (int j = 0; j < sp.dimension(); ++j) {
            Rational sum(0);
            for (const auto& f : fs) sum += influence(f, j);
            CHECK(influence(prod, j) <= Rational(t) * sum);
        }
    }
}

TEST_CASE("hypercontractive exponents match the closed forms") {
    CHECK(hc_delta(0.1, 0.5) == doctest::Approx(0.2345679012345679).epsilon(1e-12));
    CHECK(hc_delta(0.3, 0.5) == doctest::Approx(1.0408163265306123).epsilon(1e-12));
    CHECK(hc_delta(0.5, 0.1) == doctest::Approx(0.3516202805160774).epsilon(1e-12));
    // inside the validity window but nonpositive: the closed form is vacuous
    CHECK(hc_delta(0.05, 0.2) == doctest::Approx(-1.2946938780014097).epsilon(1e-12));

    CHECK(hc_delta_exact(0.1, 0.5) == doctest::Approx(hc_delta(0.1, 0.5)).epsilon(1e-12));
    CHECK(hc_delta_exact(0.5, 0.1) == doctest::Approx(1.8170911336057225).epsilon(1e-12));
    CHECK(hc_delta_exact(0.05, 0.2) == doctest::Approx(0.09287212098420428).epsilon(1e-12));

    // the solved exponent dominates the closed form wherever both exist
    for (double alpha : {0.5, 0.25, 0.1, 0.02}) {
        const double limit = alpha == 0.5 ? 0.5 : 1 - std::sqrt(alpha / (1 - alpha));
        for (double gamma = 0.02; gamma < limit; gamma += 0.02) {
            CHECK(hc_delta_exact(gamma, alpha) > 0);
            CHECK(hc_delta(gamma, alpha) <= hc_delta_exact(gamma, alpha) + 1e-12);
        }
    }

    CHECK_THROWS_AS(hc_delta(0.5, 0.5), BadParameter);   // two-point window is (0, 1/2)
    CHECK_THROWS_AS(hc_delta(0.7, 0.1), BadParameter);   // above 1 - A^{-1/2} = 2/3
    CHECK_THROWS_AS(hc_delta(0.0, 0.5), BadParameter);
    CHECK_THROWS_AS(hc_delta(0.1, 0.6), BadParameter);
    CHECK_THROWS_AS(hc_delta(0.1, 0.0), BadParameter);
    CHECK_THROWS_AS(hc_delta_exact(1.0, 0.25), BadParameter);
}

TEST_CASE("noised-norm inequality holds for constants and random functions") {
    const auto cube = ProductSpace::uniform(3, 2);
    FiniteFunction<Rational> c{cube, std::vector<Rational>(cube.size(), frac(-3, 5))};
    const auto tight = verify_hc(c, 0.2);
    CHECK(tight.pass);
    CHECK(tight.pass_exact);
    CHECK(std::fabs(tight.lhs - tight.rhs) < 1e-12);
    CHECK(std::fabs(tight.rhs - 0.6) < 1e-12);

    std::mt19937_64 gen(16);
    std::uniform_real_distribution<double> g2(0.02, 0.48);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto f = random_function(cube, gen);
        const auto report = verify_hc(f, g2(gen));
        CHECK(report.pass);
        CHECK(report.pass_exact);
        CHECK(!report.vacuous);
    }

    // alphabet 3: A = 2 < e, so the closed form is nonpositive on its whole
    // validity window (0, 1 - 2^{-1/2}); the exact exponent still works.
    const auto grid = ProductSpace::uniform(2, 3);
    std::uniform_real_distribution<double> g3(0.02, 0.29);
    for (int rep = 0; rep < 300; ++rep) {
        const auto f = random_function(grid, gen);
        const auto report = verify_hc(f, g3(gen));
        CHECK(report.vacuous);
        CHECK(report.pass);
        CHECK(report.pass_exact);
    }

    const auto f = random_function(grid, gen);
    CHECK_THROWS_AS(verify_hc(f, 0.35), BadParameter);
}

TEST_CASE("bucketing partitions are equal-size and order-respecting") {
    std::mt19937_64 gen(17);
    const auto sp = ProductSpace::uniform(3, 2);
    std::uniform_int_distribution<long long> val(-5, 5);

    FiniteFunction<long long> f{sp, {}};
    for (long long i = 0; i < sp.size(); ++i) f.values.push_back(val(gen));

    const auto whole = bucketize(f, 1);
    CHECK(whole.buckets == 1);
    CHECK(std::all_of(whole.index.begin(), whole.index.end(), [](int b) { return b == 0; }));
    CHECK(whole.intervals[0].lo == *std::min_element(f.values.begin(), f.values.end()));
    CHECK(whole.intervals[0].hi == *std::max_element(f.values.begin(), f.values.end()));

    for (int buckets : {2, 4, 8}) {
        for (int rep = 0; rep < 50; ++rep) {
            FiniteFunction<long long> g{sp, {}};
            for (long long i = 0; i < sp.size(); ++i) g.values.push_back(val(gen));
            const auto b = bucketize(g, buckets);
            std::vector<long long> sizes(buckets, 0);
            for (int bucket : b.index) ++sizes[bucket];
            CHECK(std::all_of(sizes.begin(), sizes.end(),
                              [&](long long s) { return s == sp.size() / buckets; }));
            for (int a = 0; a + 1 < buckets; ++a) CHECK(b.intervals[a].hi <= b.intervals[a + 1].lo);
            for (int a = 0; a < buckets; ++a) {
                const auto ind = bucket_indicator(b, a);
                CHECK(expectation(ind) == frac(1, buckets));
            }
        }
    }

    // singleton buckets of an injective table have pairwise-disjoint intervals
    std::vector<long long> distinct(sp.size());
    std::iota(distinct.begin(), distinct.end(), -3);
    std::shuffle(distinct.begin(), distinct.end(), gen);
    FiniteFunction<long long> inj{sp, distinct};
    const auto singles = bucketize(inj, static_cast<int>(sp.size()));
    for (const auto& iv : singles.intervals) CHECK(iv.lo == iv.hi);
    CHECK(interval_overlap_count(singles, singles) == sp.size());

    // ties fall back to index order, so a constant table buckets by index
    FiniteFunction<long long> flat{sp, std::vector<long long>(sp.size(), 7)};
    const auto tied = bucketize(flat, 4);
    for (long long i = 0; i < sp.size(); ++i)
        CHECK(tied.index[i] == static_cast<int>(i / (sp.size() / 4)));
    // with ties every interval is the same point: the overlap-lemma count
    // needs injective values, and degrades to buckets^2 here
    CHECK(interval_overlap_count(tied, tied) == 16);

    CHECK_THROWS_AS(bucketize(f, 3), DivisibilityError);
    CHECK_THROWS_AS(bucketize(f, 5), DivisibilityError);
    CHECK_THROWS_AS(bucketize(f, 0), BadParameter);
}

TEST_CASE("overlap count of injective bucketings stays within twice the bucket count") {
    std::mt19937_64 gen(18);
    const auto sp = ProductSpace::uniform(3, 2);
    std::uniform_int_distribution<long long> shiftd(-20, 20);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<long long> vf(sp.size()), vg(sp.size());
        std::iota(vf.begin(), vf.end(), shiftd(gen));
        std::iota(vg.begin(), vg.end(), shiftd(gen));
        for (auto& v : vf) v *= 3;  // spread the ranges differently
        std::shuffle(vf.begin(), vf.end(), gen);
        std::shuffle(vg.begin(), vg.end(), gen);
        for (int buckets : {2, 4, 8}) {
            const auto bf = bucketize(FiniteFunction<long long>{sp, vf}, buckets);
            const auto bg = bucketize(FiniteFunction<long long>{sp, vg}, buckets);
            CHECK(interval_overlap_count(bf, bg) <= 2 * buckets);
        }
    }
}

namespace {

BaseDistribution pair_dist(int t, int m, std::vector<long long> q1, std::vector<long long> q2,
                           std::vector<BaseDistribution::Atom> atoms) {
    return BaseDistribution(t, m, std::move(q1), std::move(q2), std::move(atoms));
}

// Oracle: noised pair expectation by enumerating the per-coordinate
// keep-or-resample kernel against the uniform coordinate marginals.
Rational kernel_pair_expectation(const FiniteFunction<Rational>& F,
                                 const FiniteFunction<Rational>& G, const BaseDistribution& d,
                                 const Rational& gamma) {
    const int left = d.t(), right = d.m() - d.t();
    const int q1 = static_cast<int>(d.q1().size()), q2 = static_cast<int>(d.q2().size());
    Rational total(0);
    for (const auto& atom : d.atoms()) {
        for (long long xi = 0; xi < F.space.size(); ++xi) {
            const auto x = F.space.decode(xi);
            Rational kx(1);
            for (int c = 0; c < left; ++c) {
                const long long base = atom.tuple[c];
                const int pos = static_cast<int>(
                    std::lower_bound(d.q1().begin(), d.q1().end(), base) - d.q1().begin());
                Rational step = gamma * frac(1, q1);
                if (x[c] == pos) step += Rational(1) - gamma;
                kx *= step;
            }
            for (long long yi = 0; yi < G.space.size(); ++yi) {
                const auto y = G.space.decode(yi);
                Rational ky(1);
                for (int c = 0; c < right; ++c) {
                    const long long base = atom.tuple[left + c];
                    const int pos = static_cast<int>(
                        std::lower_bound(d.q2().begin(), d.q2().end(), base) - d.q2().begin());
                    Rational step = gamma * frac(1, q2);
                    if (y[c] == pos) step += Rational(1) - gamma;
                    ky *= step;
                }
                total += atom.p * kx * ky * F.values[xi] * G.values[yi];
            }
        }
    }
    return total;
}

}  // namespace

TEST_CASE("pair bound under independence, correlation, and heavy noise") {
    const auto line = ProductSpace::uniform(1, 2);
    FiniteFunction<Rational> F{line, {Rational(0), Rational(1)}};

    const auto independent =
        pair_dist(1, 2, {0, 1}, {0, 1},
                  {{{0, 0}, frac(1, 4)}, {{0, 1}, frac(1, 4)}, {{1, 0}, frac(1, 4)},
                   {{1, 1}, frac(1, 4)}});
    auto report = verify_pair_bound(F, F, independent, frac(1, 4));
    CHECK(report.lhs == frac(1, 4));
    CHECK(report.buckets == 2);
    CHECK(report.rhs == doctest::Approx(0.4537595776585804).epsilon(1e-12));
    CHECK(report.pass);
    CHECK(!report.formula_vacuous);

    const auto correlated =
        pair_dist(1, 2, {0, 1}, {0, 1}, {{{0, 0}, frac(1, 2)}, {{1, 1}, frac(1, 2)}});
    report = verify_pair_bound(F, F, correlated, frac(3, 10));
    CHECK(report.lhs == frac(149, 400));
    CHECK(*report.delta_max_alphabet == doctest::Approx(1.0408163265306123).epsilon(1e-12));
    CHECK(report.rhs == doctest::Approx(0.44407001376559857).epsilon(1e-12));
    CHECK(report.pass);
    CHECK(report.lhs == kernel_pair_expectation(F, F, correlated, frac(3, 10)));

    // heavy noise: the closed form's window is empty, the solved exponent
    // takes over, and the expectation approaches full independence
    report = verify_pair_bound(F, F, correlated, frac(999, 1000));
    CHECK(report.formula_vacuous);
    CHECK(!report.delta_max_alphabet.has_value());
    CHECK(report.delta_used == doctest::Approx(999998.9999999981).epsilon(1e-6));
    CHECK(report.rhs == doctest::Approx(0.3535536356576495).epsilon(1e-9));
    CHECK(std::fabs(report.lhs_float - 0.25) < 1e-3);
    CHECK(report.pass);
}

TEST_CASE("pair bound on a two-coordinate block matches the kernel oracle") {
    // prefix block (x1, x2) uniform, suffix y = x1 xor x2
    std::vector<BaseDistribution::Atom> atoms;
    for (long long a = 0; a < 2; ++a)
        for (long long b = 0; b < 2; ++b) atoms.push_back({{a, b, a ^ b}, frac(1, 4)});
    const auto xor_dist = pair_dist(2, 3, {0, 1}, {0, 1}, atoms);

    const auto left = ProductSpace::uniform(2, 2);
    const auto right = ProductSpace::uniform(1, 2);
    FiniteFunction<Rational> F{left, {Rational(1), Rational(1), Rational(0), Rational(0)}};
    FiniteFunction<Rational> G{right, {Rational(1), Rational(0)}};

    for (const Rational& gamma : {frac(1, 5), frac(2, 5), frac(3, 4)}) {
        const auto report = verify_pair_bound(F, G, xor_dist, gamma);
        CHECK(report.lhs == kernel_pair_expectation(F, G, xor_dist, gamma));
        CHECK(report.pass);
    }
}

TEST_CASE("pair bound rejects malformed inputs") {
    const auto line = ProductSpace::uniform(1, 2);
    FiniteFunction<Rational> F{line, {Rational(0), Rational(1)}};
    const auto correlated =
        pair_dist(1, 2, {0, 1}, {0, 1}, {{{0, 0}, frac(1, 2)}, {{1, 1}, frac(1, 2)}});

    FiniteFunction<Rational> not01{line, {Rational(0), Rational(2)}};
    CHECK_THROWS_AS(verify_pair_bound(not01, F, correlated, frac(1, 4)), MeanMismatch);

    FiniteFunction<Rational> ones{line, {Rational(1), Rational(1)}};
    CHECK_THROWS_AS(verify_pair_bound(F, ones, correlated, frac(1, 4)), MeanMismatch);

    // mean 3/4 is not the reciprocal of an integer
    std::vector<BaseDistribution::Atom> atoms;
    for (long long a = 0; a < 2; ++a)
        for (long long b = 0; b < 2; ++b) atoms.push_back({{a, b, a ^ b}, frac(1, 4)});
    const auto xor_dist = pair_dist(2, 3, {0, 1}, {0, 1}, atoms);
    const auto left = ProductSpace::uniform(2, 2);
    FiniteFunction<Rational> three{left, {Rational(1), Rational(1), Rational(1), Rational(0)}};
    FiniteFunction<Rational> gthree{ProductSpace::uniform(1, 2), {Rational(1), Rational(0)}};
    CHECK_THROWS_AS(verify_pair_bound(three, gthree, xor_dist, frac(1, 4)), MeanMismatch);

    // degenerate prefix marginal
    const auto lopsided =
        pair_dist(1, 2, {0, 1}, {0, 1}, {{{0, 0}, frac(1, 2)}, {{0, 1}, frac(1, 2)}});
    CHECK_THROWS_AS(verify_pair_bound(F, F, lopsided, frac(1, 4)), BadParameter);

    CHECK_THROWS_AS(verify_pair_bound(F, F, correlated, Rational(0)), BadParameter);
    CHECK_THROWS_AS(verify_pair_bound(F, F, correlated, Rational(1)), BadParameter);

    FiniteFunction<Rational> wide{ProductSpace::uniform(2, 2),
                                  {Rational(0), Rational(1), Rational(0), Rational(1)}};
    CHECK_THROWS_AS(verify_pair_bound(wide, F, correlated, frac(1, 4)), DomainMismatch);
}

TEST_CASE("norms: consistency with moments and exponent monotonicity") {
    std::mt19937_64 gen(19);
    const auto sp = ProductSpace::uniform(2, 3);
    for (int rep = 0; rep < 10; ++rep) {
        const auto f = random_function(sp, gen);
        FiniteFunction<Rational> sq{sp, {}};
        for (long long i = 0; i < sp.size(); ++i) sq.values.push_back(f.values[i] * f.values[i]);
        const double two = lp_norm(f, 2.0);
        CHECK(two * two == doctest::Approx(to_double(expectation(sq))).epsilon(1e-12));
        CHECK(lp_norm(f, 1.0) <= lp_norm(f, 2.0) + 1e-12);
        CHECK(lp_norm(f, 2.0) <= lp_norm(f, 4.0) + 1e-12);
    }
    const auto f = random_function(sp, gen);
    CHECK_THROWS_AS(lp_norm(f, 0.0), BadParameter);
}

TEST_CASE("product space bookkeeping: encode, decode, masses, caps") {
    const auto sp = skewed_space();
    CHECK(sp.size() == 6);
    CHECK(sp.stride(0) == 3);
    CHECK(sp.stride(1) == 1);
    for (long long i = 0; i < sp.size(); ++i) CHECK(sp.encode(sp.decode(i)) == i);
    CHECK(sp.point_mass(sp.encode({1, 2})) == frac(3, 8));
    Rational total(0);
    for (const auto& m : sp.mass_table()) total += m;
    CHECK(total == 1);
    CHECK(sp.min_atom() == frac(1, 6));

    CHECK_THROWS_AS(ProductSpace::uniform(21, 2), TooLarge);
    CHECK_THROWS_AS(ProductSpace({SpaceFactor{2, {frac(1, 3), frac(1, 3)}}}), BadParameter);
    CHECK_THROWS_AS(sp.encode({0}), BadParameter);
    CHECK_THROWS_AS(sp.encode({0, 5}), BadParameter);
    CHECK_THROWS_AS(sp.factor(2), IndexOutOfRange);
}
