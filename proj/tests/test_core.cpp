#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "ocsp/instance.hpp"
#include "ocsp/permutation.hpp"
#include "ocsp/predicate.hpp"
#include "ocsp/rng.hpp"

using namespace ocsp;

namespace {

// Independent oracle for the tie extension: filter all m! rankings for
// consistency with the tuple's strict order and average the payoffs.
Rational brute_extended(const OrderingPredicate& pred, const std::vector<long long>& tuple) {
    const int m = pred.arity();
    Rational sum(0);
    long long consistent = 0;
    for (const auto& sigma : all_perms(m)) {
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
            for (int j = 0; j < m && ok; ++j)
                if (tuple[i] < tuple[j] && sigma[i] >= sigma[j]) ok = false;
        if (!ok) continue;
        ++consistent;
        sum += pred.payoff(sigma);
    }
    return sum / to_rational(consistent);
}

std::vector<long long> random_tuple(Rng& rng, int m, int lo, int hi) {
    std::vector<long long> t(m);
    for (auto& v : t) v = lo + static_cast<long long>(rng_below(rng, hi - lo + 1));
    return t;
}

}  // namespace

TEST_CASE("factorial and permutation ranking round-trip") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(5) == 120);
    for (int m = 1; m <= 6; ++m) {
        long long r = 0;
        for (const auto& p : all_perms(m)) {
            CHECK(perm_rank(p) == r);
            CHECK(perm_unrank(m, r) == p);
            ++r;
        }
        CHECK(r == factorial(m));
    }
}

TEST_CASE("natural_order_permutation ranks duplicate-free tuples") {
    std::vector<long long> t1{10, 30, 20};
    CHECK(natural_order_permutation(t1) == Perm{1, 3, 2});
    std::vector<long long> t2{5, -1};
    CHECK(natural_order_permutation(t2) == Perm{2, 1});
    std::vector<long long> t3{7};
    CHECK(natural_order_permutation(t3) == Perm{1});
    std::vector<long long> dup{4, 4, 1};
    CHECK_THROWS_AS(natural_order_permutation(dup), DuplicateEntries);

    Rng rng(kDefaultSeed);
    for (int round = 0; round < 200; ++round) {
        int m = 2 + static_cast<int>(rng_below(rng, 5));
        std::set<long long> vals;
        while (static_cast<int>(vals.size()) < m)
            vals.insert(static_cast<long long>(rng_below(rng, 1000)) - 500);
        std::vector<long long> t(vals.begin(), vals.end());
        for (int i = m - 1; i > 0; --i)
            std::swap(t[i], t[static_cast<int>(rng_below(rng, i + 1))]);
        Perm p = natural_order_permutation(t);
        REQUIRE(is_perm(p));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                CHECK((t[i] < t[j]) == (p[i] < p[j]));
    }
}

TEST_CASE("named predicates have the documented accepting sets") {
    auto mas = OrderingPredicate::mas();
    CHECK(mas.arity() == 2);
    CHECK(mas.accepting() == std::vector<Perm>{{1, 2}});

    auto btw = OrderingPredicate::btw();
    CHECK(btw.accepting() == std::vector<Perm>{{1, 3, 2}, {3, 1, 2}});

    // NBTW is the complement of BTW inside S_3.
    auto nbtw = OrderingPredicate::nbtw();
    CHECK(nbtw.accepting().size() == 4);
    for (const auto& sigma : all_perms(3))
        CHECK(nbtw.payoff(sigma) + btw.payoff(sigma) == 1);

    // Coordinate variants: argument j is not the middle rank.
    for (int j = 1; j <= 3; ++j) {
        auto p = OrderingPredicate::nbtw_coord(j);
        for (const auto& sigma : all_perms(3))
            CHECK(p.payoff(sigma) == (sigma[j - 1] != 2 ? 1 : 0));
    }
    CHECK(OrderingPredicate::nbtw_coord(3).accepting() == nbtw.accepting());

    // |SO_2t| = (2t)!/t!.
    CHECK(OrderingPredicate::same_order(1).accepting().size() == 2);
    CHECK(OrderingPredicate::same_order(2).accepting().size() == 12);
    CHECK(OrderingPredicate::same_order(3).accepting().size() == 120);

    for (const auto& name : {"MAS", "BTW", "NBTW", "NBTW_1", "NBTW_2", "NBTW_3", "SO_4", "SO_6"}) {
        auto p = OrderingPredicate::by_name(name);
        CHECK(p.name() == name);
        CHECK(p.is_zero_one());
    }
    CHECK_THROWS_AS(OrderingPredicate::by_name("XYZ"), SchemaError);
}

TEST_CASE("tie extension matches frozen values") {
    auto nbtw = OrderingPredicate::nbtw();
    auto btw = OrderingPredicate::btw();
    auto mas = OrderingPredicate::mas();

    // All tied: average over all of S_3, 4 accepting of 6.
    CHECK(nbtw.extended_payoff(std::vector<long long>{5, 5, 5}) == frac(2, 3));
    // First strictly below a tied pair: rankings (1,2,3) and (1,3,2); only the
    // first keeps the third argument off the middle.
    CHECK(nbtw.extended_payoff(std::vector<long long>{0, 1, 1}) == frac(1, 2));
    CHECK(btw.extended_payoff(std::vector<long long>{1, 3, 2}) == 1);
    CHECK(btw.extended_payoff(std::vector<long long>{7, 7, 9}) == 0);
    CHECK(mas.extended_payoff(std::vector<long long>{0, 0}) == frac(1, 2));

    CHECK_THROWS_AS(nbtw.extended_payoff(std::vector<long long>{1, 2}), ArityMismatch);
}

TEST_CASE("tie extension agrees with the enumeration oracle") {
    Rng rng(kDefaultSeed);
    std::vector<OrderingPredicate> preds;
    preds.push_back(OrderingPredicate::mas());
    preds.push_back(OrderingPredicate::btw());
    preds.push_back(OrderingPredicate::nbtw());
    preds.push_back(OrderingPredicate::nbtw_coord(1));
    preds.push_back(OrderingPredicate::same_order(2));
    for (const auto& pred : preds) {
        for (int round = 0; round < 120; ++round) {
            auto t = random_tuple(rng, pred.arity(), -2, 2);
            CHECK(pred.extended_payoff(t) == brute_extended(pred, t));
        }
    }
}

TEST_CASE("tie extension is invariant under strictly increasing maps") {
    Rng rng(kDefaultSeed + 1);
    auto nbtw = OrderingPredicate::nbtw();
    auto so4 = OrderingPredicate::same_order(2);
    for (const auto* pred : {&nbtw, &so4}) {
        for (int round = 0; round < 80; ++round) {
            auto t = random_tuple(rng, pred->arity(), 0, 3);
            // Strictly increasing map on {0..3}: cumulative positive steps.
            long long table[4];
            long long acc = -7;
            for (int v = 0; v < 4; ++v) {
                acc += 1 + static_cast<long long>(rng_below(rng, 9));
                table[v] = acc;
            }
            auto mapped = t;
            for (auto& v : mapped) v = table[v];
            CHECK(pred->extended_payoff(t) == pred->extended_payoff(mapped));
        }
    }
}

TEST_CASE("extended payoffs stay inside [0,1]") {
    Rng rng(kDefaultSeed + 2);
    auto so4 = OrderingPredicate::same_order(2);
    for (int round = 0; round < 200; ++round) {
        auto t = random_tuple(rng, 4, 0, 2);
        Rational v = so4.extended_payoff(t);
        CHECK(v >= 0);
        CHECK(v <= 1);
    }
}

TEST_CASE("random-ordering values of the named predicates") {
    CHECK(OrderingPredicate::mas().random_ordering_value() == frac(1, 2));
    CHECK(OrderingPredicate::btw().random_ordering_value() == frac(1, 3));
    CHECK(OrderingPredicate::nbtw().random_ordering_value() == frac(2, 3));
    CHECK(OrderingPredicate::same_order(2).random_ordering_value() == frac(1, 2));
    CHECK(OrderingPredicate::same_order(3).random_ordering_value() == frac(1, 6));

    // A fully tied tuple evaluates to exactly the random-ordering value.
    Rng rng(kDefaultSeed + 3);
    for (const auto& pred :
         {OrderingPredicate::nbtw(), OrderingPredicate::same_order(2), OrderingPredicate::mas()}) {
        long long c = static_cast<long long>(rng_below(rng, 100)) - 50;
        std::vector<long long> t(pred.arity(), c);
        CHECK(pred.extended_payoff(t) == pred.random_ordering_value());
    }
}

TEST_CASE("ordering_value evaluates weighted instances") {
    OcspInstance inst;
    for (const auto* name : {"x", "y", "z", "a", "b"}) inst.add_variable(name);
    int mas = inst.add_predicate(OrderingPredicate::mas());
    auto arc = [&](const char* u, const char* v) {
        inst.add_constraint({inst.variable_index(u), inst.variable_index(v)}, mas, frac(1, 6));
    };
    arc("b", "x");
    arc("x", "a");
    arc("a", "z");
    arc("z", "b");
    arc("b", "y");
    arc("y", "a");

    Ordering ord;
    ord.ranks = {{"b", 1}, {"x", 2}, {"y", 3}, {"a", 4}, {"z", 5}};
    CHECK(ordering_value(inst, ord) == frac(5, 6));

    Ordering missing;
    missing.ranks = {{"b", 1}, {"x", 2}};
    CHECK_THROWS_AS(ordering_value(inst, missing), UnrankedVariable);

    // Ties are handled through the extension: all equal ranks give the
    // random baseline.
    Ordering tied;
    for (const auto* name : {"x", "y", "z", "a", "b"}) tied.ranks[name] = 0;
    CHECK(ordering_value(inst, tied) == frac(1, 2));
    CHECK(random_baseline(inst) == frac(1, 2));
}

TEST_CASE("instance construction rejects malformed input") {
    OcspInstance inst;
    inst.add_variable("x");
    CHECK_THROWS_AS(inst.add_variable("x"), SchemaError);
    inst.add_variable("y");
    int mas = inst.add_predicate(OrderingPredicate::mas());
    CHECK_THROWS_AS(inst.add_constraint({0}, mas, Rational(1)), ArityMismatch);
    CHECK_THROWS_AS(inst.add_constraint({0, 5}, mas, Rational(1)), SchemaError);
    CHECK_THROWS_AS(inst.add_constraint({0, 1}, 9, Rational(1)), SchemaError);
    CHECK_THROWS_AS(inst.add_constraint({0, 1}, mas, Rational(0)), SchemaError);

    inst.add_constraint({0, 1}, mas, Rational(3));
    inst.add_constraint({1, 0}, mas, Rational(1));
    inst.normalize_weights();
    CHECK(inst.weight_total() == 1);
    CHECK(inst.constraints()[0].weight == frac(3, 4));
}

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rational("2/4") == frac(1, 2));
    CHECK(parse_rational("-3") == Rational(-3));
    CHECK(parse_rational("0.05") == frac(1, 20));
    CHECK(parse_rational("1.25") == frac(5, 4));
    CHECK(format_rational(frac(2, 4)) == "1/2");
    CHECK(format_rational(Rational(7)) == "7");
    CHECK_THROWS_AS(parse_rational(""), SchemaError);
    CHECK_THROWS_AS(parse_rational("x/y"), SchemaError);
    CHECK_THROWS_AS(parse_rational("1/"), SchemaError);
}
