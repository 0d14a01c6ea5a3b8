#include "ocsp/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace ocsp {

namespace {

// Compiled evaluator. When weight and payoff denominators are small, the
// value of an arrangement is a single __int128 numerator over wden*payden,
// which keeps the exhaustive solver exact without mpq work per ordering.
class Evaluator {
public:
    explicit Evaluator(const OcspInstance& inst) : inst_(inst) {
        mpz_class wden(1), payden(1);
        for (const auto& c : inst.constraints())
            mpz_lcm(wden.get_mpz_t(), wden.get_mpz_t(), c.weight.get_den().get_mpz_t());
        for (const auto& p : inst.predicates()) {
            mpz_class pd(static_cast<long>(factorial(p.arity())));
            for (const auto& pay : all_payoffs(p))
                mpz_lcm(pd.get_mpz_t(), pd.get_mpz_t(), pay.get_den().get_mpz_t());
            mpz_lcm(payden.get_mpz_t(), payden.get_mpz_t(), pd.get_mpz_t());
        }
        mpz_class wsum(0);
        for (const auto& c : inst.constraints()) {
            mpz_class wn = c.weight.get_num() * (wden / c.weight.get_den());
            wsum += wn;
        }
        int_path_ = wden.fits_slong_p() && payden.fits_slong_p() &&
                    mpz_sizeinbase(mpz_class(wsum * payden).get_mpz_t(), 2) < 120;
        if (int_path_) {
            wden_ = wden.get_si();
            payden_ = payden.get_si();
            for (const auto& c : inst.constraints()) {
                CompiledConstraint cc;
                cc.vars = c.vars;
                cc.pred = c.pred;
                mpz_class wn = c.weight.get_num() * (wden / c.weight.get_den());
                cc.wnum = wn.get_si();
                const auto& p = inst.predicates()[c.pred];
                cc.paynum.reserve(factorial(p.arity()));
                for (long long r = 0; r < factorial(p.arity()); ++r) {
                    Rational scaled = p.payoff_by_rank(r) * Rational(payden_);
                    cc.paynum.push_back(scaled.get_num().get_si());
                }
                compiled_.push_back(std::move(cc));
            }
        }
    }

    bool int_path() const { return int_path_; }

    // Exact value of the arrangement; ranks[v] = 1-based position of variable v.
    Rational value(const std::vector<int>& ranks) const {
        if (int_path_) return Rational(mpz_class_from_int128(value_num(ranks))) / Rational(mpz_class(wden_) * payden_);
        Rational sum(0);
        std::vector<long long> tuple;
        for (const auto& c : inst_.constraints()) {
            tuple.clear();
            for (int v : c.vars) tuple.push_back(ranks[v]);
            sum += c.weight * inst_.predicates()[c.pred].extended_payoff(tuple);
        }
        return sum;
    }

    // Numerator over wden*payden (int path only).
    __int128 value_num(const std::vector<int>& ranks) const {
        __int128 acc = 0;
        std::array<int, 16> tup;
        for (const auto& c : compiled_) {
            const int m = static_cast<int>(c.vars.size());
            for (int k = 0; k < m; ++k) tup[k] = ranks[c.vars[k]];
            acc += static_cast<__int128>(c.wnum) * scaled_payoff(c, tup.data(), m);
        }
        return acc;
    }

    Rational from_num(__int128 num) const {
        return Rational(mpz_class_from_int128(num)) / Rational(mpz_class(wden_) * payden_);
    }

private:
    struct CompiledConstraint {
        std::vector<int> vars;
        int pred = 0;
        long long wnum = 0;
        std::vector<long long> paynum;
        mutable std::map<std::vector<int>, long long> tie_cache;
    };

    static std::vector<Rational> all_payoffs(const OrderingPredicate& p) {
        std::vector<Rational> out;
        for (long long r = 0; r < factorial(p.arity()); ++r) out.push_back(p.payoff_by_rank(r));
        return out;
    }

    static mpz_class mpz_class_from_int128(__int128 v) {
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
        mpz_class hi(static_cast<unsigned long>(u >> 64));
        mpz_class lo(static_cast<unsigned long>(u));
        mpz_class out = (hi << 64) + lo;
        return neg ? mpz_class(-out) : out;
    }

    long long scaled_payoff(const CompiledConstraint& c, const int* tup, int m) const {
        // Lehmer rank with tie detection in one pass (suffix comparisons see
        // every pair once).
        long long rank = 0;
        bool tie = false;
        for (int i = 0; i < m; ++i) {
            int smaller = 0;
            for (int j = i + 1; j < m; ++j) {
                if (tup[j] < tup[i]) ++smaller;
                else if (tup[j] == tup[i]) tie = true;
            }
            rank = rank * (m - i) + smaller;
        }
        if (!tie) return c.paynum[rank];
        // Standardize the tied tuple so the cache is shared across rank shifts.
        std::vector<int> pattern(m);
        for (int i = 0; i < m; ++i) {
            int r = 0;
            for (int j = 0; j < m; ++j)
                if (tup[j] < tup[i]) ++r;
            pattern[i] = r;
        }
        auto it = c.tie_cache.find(pattern);
        if (it != c.tie_cache.end()) return it->second;
        std::vector<long long> t(pattern.begin(), pattern.end());
        Rational scaled = inst_.predicates()[c.pred].extended_payoff(t) * Rational(payden_);
        long long num = scaled.get_num().get_si();
        c.tie_cache.emplace(std::move(pattern), num);
        return num;
    }

    const OcspInstance& inst_;
    bool int_path_ = false;
    long wden_ = 1;
    long payden_ = 1;
    std::vector<CompiledConstraint> compiled_;
};

Ordering arrangement_to_ordering(const OcspInstance& inst, const std::vector<int>& arrangement) {
    Ordering ord;
    for (size_t pos = 0; pos < arrangement.size(); ++pos)
        ord.ranks[inst.variables()[arrangement[pos]]] = static_cast<long long>(pos) + 1;
    return ord;
}

std::vector<int> ranks_of_arrangement(const std::vector<int>& arrangement) {
    std::vector<int> ranks(arrangement.size());
    for (size_t pos = 0; pos < arrangement.size(); ++pos)
        ranks[arrangement[pos]] = static_cast<int>(pos) + 1;
    return ranks;
}

}  // namespace

SolveReport exact_solve(const OcspInstance& inst, int cap) {
    const int n = static_cast<int>(inst.variables().size());
    SolveReport rep;
    rep.method = SolveMethod::exact;
    if (inst.constraints().empty()) {
        rep.value = 1;
        rep.value_float = 1.0;
        std::vector<int> ident(n);
        std::iota(ident.begin(), ident.end(), 0);
        rep.best = arrangement_to_ordering(inst, ident);
        rep.warnings.push_back("instance has no constraints; value is vacuously 1");
        return rep;
    }
    if (cap < 1 || cap > 11) throw BadParameter("exact_solve: cap must be in [1,11]");
    if (n > cap)
        throw TooLarge("exact_solve: " + std::to_string(n) + " variables exceeds cap " +
                       std::to_string(cap));

    Evaluator eval(inst);
    std::vector<int> arrangement(n);
    std::iota(arrangement.begin(), arrangement.end(), 0);

    std::vector<int> best_arr = arrangement;
    if (eval.int_path()) {
        __int128 best = eval.value_num(ranks_of_arrangement(arrangement));
        auto arr = arrangement;
        while (std::next_permutation(arr.begin(), arr.end())) {
            __int128 v = eval.value_num(ranks_of_arrangement(arr));
            if (v > best) {
                best = v;
                best_arr = arr;
            }
        }
        rep.value = eval.from_num(best);
    } else {
        Rational best = eval.value(ranks_of_arrangement(arrangement));
        auto arr = arrangement;
        while (std::next_permutation(arr.begin(), arr.end())) {
            Rational v = eval.value(ranks_of_arrangement(arr));
            if (v > best) {
                best = v;
                best_arr = arr;
            }
        }
        rep.value = best;
    }
    rep.value_float = to_double(rep.value);
    rep.best = arrangement_to_ordering(inst, best_arr);
    return rep;
}

SolveReport local_search(const OcspInstance& inst, std::uint64_t seed, long long max_iters) {
    const int n = static_cast<int>(inst.variables().size());
    SolveReport rep;
    rep.method = SolveMethod::local_search;
    rep.seed = seed;
    if (inst.constraints().empty()) {
        rep.value = 1;
        rep.value_float = 1.0;
        std::vector<int> ident(n);
        std::iota(ident.begin(), ident.end(), 0);
        rep.best = arrangement_to_ordering(inst, ident);
        rep.warnings.push_back("instance has no constraints; value is vacuously 1");
        return rep;
    }
    if (max_iters < 0) throw BadParameter("local_search: max_iters must be >= 0");

    Evaluator eval(inst);
    Rng rng(seed);
    std::vector<int> arr(n);
    std::iota(arr.begin(), arr.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(arr[i], arr[static_cast<int>(rng_below(rng, i + 1))]);

    Rational cur = eval.value(ranks_of_arrangement(arr));
    bool improved = true;
    while (improved && rep.iterations < max_iters) {
        improved = false;
        // Adjacent transpositions, then reinsertions, fixed scan order.
        for (int i = 0; i + 1 < n && !improved; ++i) {
            std::swap(arr[i], arr[i + 1]);
            Rational v = eval.value(ranks_of_arrangement(arr));
            if (v > cur) {
                cur = v;
                improved = true;
            } else {
                std::swap(arr[i], arr[i + 1]);
            }
        }
        for (int i = 0; i < n && !improved; ++i) {
            for (int j = 0; j < n && !improved; ++j) {
                if (i == j) continue;
                std::vector<int> cand = arr;
                int moved = cand[i];
                cand.erase(cand.begin() + i);
                cand.insert(cand.begin() + j, moved);
                Rational v = eval.value(ranks_of_arrangement(cand));
                if (v > cur) {
                    cur = v;
                    arr = std::move(cand);
                    improved = true;
                }
            }
        }
        if (improved) ++rep.iterations;
    }
    if (improved && rep.iterations >= max_iters)
        rep.warnings.push_back("stopped at max_iters before reaching a local optimum");
    rep.value = cur;
    rep.value_float = to_double(cur);
    rep.best = arrangement_to_ordering(inst, arr);
    return rep;
}

McStats monte_carlo_value(const RankedSampler& sampler, long long n, std::uint64_t seed,
                          int workers) {
    if (n <= 0) throw BadParameter("monte_carlo_value: sample count must be positive");
    if (workers < 1) throw BadParameter("monte_carlo_value: workers must be >= 1");
    if (workers > static_cast<int>(n)) workers = static_cast<int>(n);

    struct Shard {
        double sum = 0;
        double sumsq = 0;
        long long n = 0;
    };
    std::vector<Shard> shards(workers);
    auto run_shard = [&](int k) {
        long long nk = n / workers + (k < n % workers ? 1 : 0);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        Shard s;
        for (long long i = 0; i < nk; ++i) {
            RankedConstraint rc = sampler(rng);
            double x = to_double(rc.pred->extended_payoff(rc.tuple));
            s.sum += x;
            s.sumsq += x * x;
            ++s.n;
        }
        shards[k] = s;
    };
    if (workers == 1) {
        run_shard(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int k = 0; k < workers; ++k) pool.emplace_back(run_shard, k);
        for (auto& t : pool) t.join();
    }

    double sum = 0, sumsq = 0;
    long long total = 0;
    for (const auto& s : shards) {
        sum += s.sum;
        sumsq += s.sumsq;
        total += s.n;
    }
    McStats stats;
    stats.n = total;
    stats.mean = sum / static_cast<double>(total);
    double var = 0;
    if (total > 1) {
        var = (sumsq - sum * sum / static_cast<double>(total)) / static_cast<double>(total - 1);
        if (var < 0) var = 0;
    }
    stats.stddev = std::sqrt(var);
    stats.ci_halfwidth = 3.0 * stats.stddev / std::sqrt(static_cast<double>(total));
    return stats;
}

}  // namespace ocsp
