#include "ocsp/dictatorship.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <utility>

#include "ocsp/errors.hpp"

namespace ocsp {

namespace {

int letter_position(const std::vector<long long>& alphabet, long long letter) {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        if (alphabet[i] == letter) return static_cast<int>(i);
    throw DomainMismatch("letter missing from its alphabet");
}

std::vector<std::pair<std::vector<long long>, double>> cumulative(
    const std::vector<std::pair<std::vector<long long>, Rational>>& marginal) {
    std::vector<std::pair<std::vector<long long>, double>> out;
    double run = 0;
    for (const auto& [tuple, p] : marginal) {
        run += to_double(p);
        out.emplace_back(tuple, run);
    }
    out.back().second = 1.0;  // guard against accumulated rounding
    return out;
}

std::size_t pick_index(const std::vector<std::pair<std::vector<long long>, double>>& cum,
                       Rng& rng) {
    const double u = rng_unit(rng);
    for (std::size_t i = 0; i < cum.size(); ++i)
        if (u < cum[i].second) return i;
    return cum.size() - 1;
}

void check_tables(const FiniteFunction<long long>& f, const FiniteFunction<long long>& g,
                  const TestDistribution& td, const OrderingPredicate& pred) {
    const auto& base = td.base();
    const int q1 = static_cast<int>(base.q1().size());
    const int q2 = static_cast<int>(base.q2().size());
    if (!(f.space == ProductSpace::uniform(td.left_labels(), q1)))
        throw DomainMismatch("left table must live on the uniform prefix-query domain");
    if (!(g.space == ProductSpace::uniform(td.right_labels(), q2)))
        throw DomainMismatch("right table must live on the uniform suffix-query domain");
    if (pred.arity() != base.m())
        throw ArityMismatch("predicate arity must match the query width");
}

}  // namespace

TestDistribution::TestDistribution(BaseDistribution base, Rational gamma, std::vector<int> pi,
                                   int left_labels)
    : base_(std::move(base)),
      gamma_(std::move(gamma)),
      pi_(std::move(pi)),
      left_labels_(left_labels) {
    if (gamma_ < 0 || gamma_ > 1) throw BadParameter("noise rate must lie in [0, 1]");
    if (left_labels_ < 1) throw BadParameter("left label count must be positive");
    if (pi_.empty()) throw BadParameter("projection must cover at least one right label");
    for (int b : pi_)
        if (b < 0 || b >= left_labels_) throw BadParameter("projection value out of range");
    gamma_float_ = to_double(gamma_);

    const auto prefixes = base_.prefix_marginal();
    prefix_cum_ = cumulative(prefixes);
    for (const auto& [prefix, p] : prefixes) {
        auto conditional = base_.suffix_given_prefix(prefix);
        if (conditional.empty())
            throw ConditioningFailure("a prefix with mass has no suffix support");
        suffix_cum_.push_back(cumulative(conditional));
    }
}

DictSample dict_test_sample(const TestDistribution& td, Rng& rng) {
    const BaseDistribution& base = td.base_;
    const int t = base.t(), m = base.m();
    DictSample s;
    std::vector<std::size_t> chosen(td.left_labels_);
    for (int l = 0; l < td.left_labels_; ++l) {
        chosen[l] = pick_index(td.prefix_cum_, rng);
        s.x.push_back(td.prefix_cum_[chosen[l]].first);
    }
    for (std::size_t r = 0; r < td.pi_.size(); ++r) {
        const auto& conditional = td.suffix_cum_[chosen[td.pi_[r]]];
        s.y.push_back(conditional[pick_index(conditional, rng)].first);
    }
    if (td.gamma_ > 0) {
        for (auto& row : s.x)
            for (int c = 0; c < t; ++c)
                if (rng_unit(rng) < td.gamma_float_)
                    row[c] = base.q1()[rng_below(rng, base.q1().size())];
        for (auto& row : s.y)
            for (int c = 0; c < m - t; ++c)
                if (rng_unit(rng) < td.gamma_float_)
                    row[c] = base.q2()[rng_below(rng, base.q2().size())];
    }
    return s;
}

DictTestPmf dict_test_pmf(const TestDistribution& td, long long cap) {
    const BaseDistribution& base = td.base();
    const int t = base.t(), m = base.m();
    const int left = td.left_labels(), right = td.right_labels();
    const int q1 = static_cast<int>(base.q1().size());
    const int q2 = static_cast<int>(base.q2().size());

    double entries = 1;
    for (int i = 0; i < left * t; ++i) entries *= q1;
    for (int i = 0; i < right * (m - t); ++i) entries *= q2;
    if (entries > static_cast<double>(cap))
        throw TooLarge("joint query domain exceeds the cap");

    std::vector<SpaceFactor> factors;
    const SpaceFactor fx{q1, std::vector<Rational>(q1, Rational(1) / q1)};
    const SpaceFactor fy{q2, std::vector<Rational>(q2, Rational(1) / q2)};
    factors.insert(factors.end(), static_cast<std::size_t>(left) * t, fx);
    factors.insert(factors.end(), static_cast<std::size_t>(right) * (m - t), fy);

    DictTestPmf out{ProductSpace(std::move(factors)), {}, left, right, t, m};
    out.mass.assign(out.domain.size(), Rational(0));

    const auto prefixes = base.prefix_marginal();
    const int natoms = static_cast<int>(prefixes.size());
    std::vector<std::vector<int>> prefix_pos(natoms, std::vector<int>(t));
    std::vector<std::vector<std::pair<std::vector<int>, Rational>>> cond_pos(natoms);
    for (int i = 0; i < natoms; ++i) {
        for (int c = 0; c < t; ++c)
            prefix_pos[i][c] = letter_position(base.q1(), prefixes[i].first[c]);
        for (const auto& [suffix, p] : base.suffix_given_prefix(prefixes[i].first)) {
            std::vector<int> pos(m - t);
            for (int c = 0; c < m - t; ++c) pos[c] = letter_position(base.q2(), suffix[c]);
            cond_pos[i].emplace_back(std::move(pos), p);
        }
    }

    // Sum the pre-noise mass of every (prefix choice per left label, suffix
    // choice per right label) configuration, then smooth with the per-entry
    // uniform-resampling kernel, which is the noise operator on this domain.
    std::vector<int> digits(out.domain.dimension(), 0);
    std::vector<int> pchoice(left, 0);
    while (true) {
        Rational pmass(1);
        for (int l = 0; l < left; ++l) {
            pmass *= prefixes[pchoice[l]].second;
            for (int c = 0; c < t; ++c) digits[out.x_cell(l, c)] = prefix_pos[pchoice[l]][c];
        }
        std::vector<int> schoice(right, 0);
        while (true) {
            Rational mass = pmass;
            for (int r = 0; r < right; ++r) {
                const auto& [pos, p] = cond_pos[pchoice[td.pi()[r]]][schoice[r]];
                mass *= p;
                for (int c = 0; c < m - t; ++c) digits[out.y_cell(r, c)] = pos[c];
            }
            out.mass[out.domain.encode(digits)] += mass;
            int r = 0;
            while (r < right) {
                if (++schoice[r] < static_cast<int>(cond_pos[pchoice[td.pi()[r]]].size())) break;
                schoice[r++] = 0;
            }
            if (r == right) break;
        }
        int l = 0;
        while (l < left && ++pchoice[l] == natoms) pchoice[l++] = 0;
        if (l == left) break;
    }

    if (td.gamma() > 0) {
        FiniteFunction<Rational> table{out.domain, std::move(out.mass)};
        const Rational retain = Rational(1) - td.gamma();
        table = noise_operator(table, retain);
        out.mass = std::move(table.values);
    }
    return out;
}

Rational acceptance_probability(const FiniteFunction<long long>& f,
                                const FiniteFunction<long long>& g,
                                const TestDistribution& td, const OrderingPredicate& pred,
                                long long cap) {
    check_tables(f, g, td, pred);
    const int t = td.base().t(), m = td.base().m();
    const int left = td.left_labels(), right = td.right_labels();

    const DictTestPmf pmf = dict_test_pmf(td, cap);
    Rational acc(0);
    std::map<std::vector<long long>, Rational> payoff_memo;
    std::vector<int> fpoint(left), gpoint(right);
    std::vector<long long> tuple(m);
    for (long long idx = 0; idx < static_cast<long long>(pmf.mass.size()); ++idx) {
        const Rational& p = pmf.mass[idx];
        if (p == 0) continue;
        const std::vector<int> digits = pmf.domain.decode(idx);
        for (int r = 0; r < t; ++r) {
            for (int l = 0; l < left; ++l) fpoint[l] = digits[pmf.x_cell(l, r)];
            tuple[r] = f.values[f.space.encode(fpoint)];
        }
        for (int c = 0; c < m - t; ++c) {
            for (int r = 0; r < right; ++r) gpoint[r] = digits[pmf.y_cell(r, c)];
            tuple[t + c] = g.values[g.space.encode(gpoint)];
        }
        auto [it, fresh] = payoff_memo.try_emplace(tuple, Rational(0));
        if (fresh) it->second = pred.extended_payoff(tuple);
        acc += p * it->second;
    }
    return acc;
}

McStats acceptance_probability_mc(const FiniteFunction<long long>& f,
                                  const FiniteFunction<long long>& g,
                                  const TestDistribution& td, const OrderingPredicate& pred,
                                  long long samples, std::uint64_t seed, int workers) {
    check_tables(f, g, td, pred);
    struct State {
        TestDistribution td;
        FiniteFunction<long long> f, g;
        OrderingPredicate pred;
    };
    auto state = std::make_shared<State>(State{td, f, g, pred});
    const int t = td.base().t(), m = td.base().m();
    const int left = td.left_labels(), right = td.right_labels();

    RankedSampler sampler = [state, t, m, left, right](Rng& rng) {
        const BaseDistribution& base = state->td.base();
        const DictSample s = dict_test_sample(state->td, rng);
        std::vector<int> fpoint(left), gpoint(right);
        std::vector<long long> tuple(m);
        for (int r = 0; r < t; ++r) {
            for (int l = 0; l < left; ++l)
                fpoint[l] = letter_position(base.q1(), s.x[l][r]);
            tuple[r] = state->f.values[state->f.space.encode(fpoint)];
        }
        for (int c = 0; c < m - t; ++c) {
            for (int r = 0; r < right; ++r)
                gpoint[r] = letter_position(base.q2(), s.y[r][c]);
            tuple[t + c] = state->g.values[state->g.space.encode(gpoint)];
        }
        return RankedConstraint{&state->pred, std::move(tuple)};
    };
    return monte_carlo_value(sampler, samples, seed, workers);
}

Rational bucketed_acceptance(const FiniteFunction<long long>& f,
                             const FiniteFunction<long long>& g, const TestDistribution& td,
                             const OrderingPredicate& pred, int buckets, long long cap) {
    check_tables(f, g, td, pred);
    const int t = td.base().t(), m = td.base().m();
    const int left = td.left_labels(), right = td.right_labels();

    const Bucketing bf = bucketize(f, buckets);
    const Bucketing bg = bucketize(g, buckets);
    const long long size_f = f.space.size() / buckets;
    const long long size_g = g.space.size() / buckets;
    std::vector<std::vector<long long>> fvals(buckets), gvals(buckets);
    for (long long i = 0; i < f.space.size(); ++i) fvals[bf.index[i]].push_back(f.values[i]);
    for (long long i = 0; i < g.space.size(); ++i) gvals[bg.index[i]].push_back(g.values[i]);

    double members = 1;
    for (int r = 0; r < t; ++r) members *= static_cast<double>(size_f);
    for (int c = 0; c < m - t; ++c) members *= static_cast<double>(size_g);
    if (members > static_cast<double>(cap))
        throw TooLarge("bucket-member enumeration exceeds the cap");
    const Rational member_count = to_rational(static_cast<long long>(members));

    // Payoff of a bucket tuple: each query answer is replaced by an
    // independent uniform member value of the answered bucket.
    std::map<std::vector<int>, Rational> block_memo;
    const auto block_payoff = [&](const std::vector<int>& key) -> const Rational& {
        auto [it, fresh] = block_memo.try_emplace(key, Rational(0));
        if (fresh) {
            Rational sum(0);
            std::vector<int> pick(m, 0);
            std::vector<long long> tuple(m);
            while (true) {
                for (int r = 0; r < t; ++r) tuple[r] = fvals[key[r]][pick[r]];
                for (int c = 0; c < m - t; ++c)
                    tuple[t + c] = gvals[key[t + c]][pick[t + c]];
                sum += pred.extended_payoff(tuple);
                int i = 0;
                while (i < m) {
                    const long long limit = i < t ? size_f : size_g;
                    if (++pick[i] < limit) break;
                    pick[i++] = 0;
                }
                if (i == m) break;
            }
            it->second = sum / member_count;
        }
        return it->second;
    };

    const DictTestPmf pmf = dict_test_pmf(td, cap);
    Rational acc(0);
    std::vector<int> fpoint(left), gpoint(right);
    std::vector<int> key(m);
    for (long long idx = 0; idx < static_cast<long long>(pmf.mass.size()); ++idx) {
        const Rational& p = pmf.mass[idx];
        if (p == 0) continue;
        const std::vector<int> digits = pmf.domain.decode(idx);
        for (int r = 0; r < t; ++r) {
            for (int l = 0; l < left; ++l) fpoint[l] = digits[pmf.x_cell(l, r)];
            key[r] = bf.index[f.space.encode(fpoint)];
        }
        for (int c = 0; c < m - t; ++c) {
            for (int r = 0; r < right; ++r) gpoint[r] = digits[pmf.y_cell(r, c)];
            key[t + c] = bg.index[g.space.encode(gpoint)];
        }
        acc += p * block_payoff(key);
    }
    return acc;
}

BucketingLossReport verify_bucketing_loss(const FiniteFunction<long long>& f,
                                          const FiniteFunction<long long>& g,
                                          const TestDistribution& td,
                                          const OrderingPredicate& pred, int buckets,
                                          long long cap) {
    BucketingLossReport report;
    report.buckets = buckets;
    report.m = td.base().m();
    report.acceptance = acceptance_probability(f, g, td, pred, cap);
    report.bucketed = bucketed_acceptance(f, g, td, pred, buckets, cap);
    report.lhs = abs(report.acceptance - report.bucketed);
    report.lhs_float = to_double(report.lhs);
    report.exponent =
        choose_pair_exponent(to_double(td.gamma()), static_cast<int>(td.base().q1().size()),
                             static_cast<int>(td.base().q2().size()));
    report.rhs = report.m * report.m *
                 std::pow(static_cast<double>(buckets), -report.exponent.pair_exponent);
    report.pass = report.lhs_float <= report.rhs + 1e-12;
    return report;
}

DecouplingReport verify_decoupling_bound(const FiniteFunction<long long>& f,
                                         const FiniteFunction<long long>& g,
                                         const TestDistribution& td,
                                         const OrderingPredicate& pred, int buckets,
                                         long long cap) {
    DecouplingReport report;
    report.buckets = buckets;
    report.m = td.base().m();
    report.acceptance = acceptance_probability(f, g, td, pred, cap);
    const TestDistribution decoupled(BaseDistribution::decouple(td.base()), td.gamma(),
                                     td.pi(), td.left_labels());
    report.acceptance_decoupled = acceptance_probability(f, g, decoupled, pred, cap);
    report.lhs = abs(report.acceptance - report.acceptance_decoupled);
    report.lhs_float = to_double(report.lhs);

    const Bucketing bf = bucketize(f, buckets);
    const Bucketing bg = bucketize(g, buckets);
    std::vector<std::vector<Rational>> inf_f(buckets), inf_g(buckets);
    for (int a = 0; a < buckets; ++a) {
        inf_f[a] = noisy_influences(bucket_indicator(bf, a), td.gamma());
        inf_g[a] = noisy_influences(bucket_indicator(bg, a), td.gamma());
    }
    double sqrt_sum = 0;
    for (int a = 0; a < buckets; ++a)
        for (int b = 0; b < buckets; ++b) {
            Rational coinf(0);
            for (int j = 0; j < td.right_labels(); ++j)
                coinf += inf_f[a][td.pi()[j]] * inf_g[b][j];
            sqrt_sum += std::sqrt(to_double(coinf));
        }
    report.coinf_sqrt_sum = sqrt_sum;

    const double gamma = to_double(td.gamma());
    const double m = report.m;
    report.main_term = std::pow(gamma, -0.5) * std::sqrt(m) * std::pow(4.0, m) *
                       std::pow(static_cast<double>(buckets), m) * sqrt_sum;
    report.exponent =
        choose_pair_exponent(gamma, static_cast<int>(td.base().q1().size()),
                             static_cast<int>(td.base().q2().size()));
    report.tail_term =
        2 * std::pow(static_cast<double>(buckets), -report.exponent.pair_exponent) * m * m;
    report.rhs = report.main_term + report.tail_term;
    report.pass = report.lhs_float <= report.rhs + 1e-12;
    return report;
}

}  // namespace ocsp
