#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "ocsp/cli.hpp"
#include "ocsp/dictatorship.hpp"
#include "ocsp/io.hpp"
#include "ocsp/solvers.hpp"

using namespace ocsp;

namespace {

// every test file lives in one scratch directory, names prefixed per case
struct Scratch {
    std::filesystem::path dir;
    explicit Scratch(const std::string& name)
        : dir(std::filesystem::temp_directory_path() / ("ocsp_cli_" + name)) {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    ~Scratch() { std::filesystem::remove_all(dir); }
    std::string operator()(const std::string& file) const { return (dir / file).string(); }
};

int run(std::vector<std::string> args) { return cli_run(args); }

Json report_of(const std::string& path) {
    return parse_json(read_file(path), path)["report"];
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({}) == 1);
    CHECK(run({"no-such-verb"}) == 1);
    CHECK(run({"solve"}) == 1);                       // missing --in
    CHECK(run({"--help"}) == 0);
    CHECK(run({"gen-lc", "--nu", "0", "--out", "x"}) == 1);  // rejected by range check
    Scratch tmp("usage");
    CHECK(run({"eval", "--in", tmp("absent.json"), "--ordering", tmp("o.json"),
               "--report", tmp("r.json")}) == 1);
}

TEST_CASE("generate, reduce, dictate, eval pipeline") {
    Scratch tmp("pipe");
    CHECK(run({"gen-lc", "--nu", "1", "--nv", "1", "--L", "1", "--R", "2", "--edges", "1",
               "--plant", "--seed", "9", "--out", tmp("lc.json"), "--planted-out",
               tmp("lab.json"), "--report", tmp("gen.json")}) == 0);
    CHECK(report_of(tmp("gen.json"))["planted_value"] == "1");

    CHECK(run({"reduce", "--in", tmp("lc.json"), "--base", "nbtw:2", "--gamma", "1/4",
               "--out", tmp("inst.json"), "--report", tmp("red.json")}) == 0);
    const OcspInstance inst =
        instance_from_json(parse_json(read_file(tmp("inst.json")), "inst"));
    CHECK(inst.weight_total() == 1);
    CHECK(report_of(tmp("red.json"))["variables"] == inst.variables().size());

    CHECK(run({"dictate", "--in", tmp("lc.json"), "--labeling", tmp("lab.json"), "--base",
               "nbtw:2", "--out", tmp("asg.json"), "--ordering-out", tmp("ord.json"),
               "--report", tmp("dic.json")}) == 0);

    CHECK(run({"eval", "--in", tmp("inst.json"), "--ordering", tmp("ord.json"), "--report",
               tmp("eval.json")}) == 0);
    const Ordering ord = ordering_from_json(parse_json(read_file(tmp("ord.json")), "ord"));
    CHECK(report_of(tmp("eval.json"))["value"] ==
          format_rational(ordering_value(inst, ord)));

    // the Monte-Carlo estimate agrees with the exact evaluation
    CHECK(run({"solve", "--in", tmp("inst.json"), "--mc", "--ordering", tmp("ord.json"),
               "--samples", "20000", "--seed", "4", "--report", tmp("mc.json")}) == 0);
    const Json mc = report_of(tmp("mc.json"));
    const double exact = to_double(ordering_value(inst, ord));
    CHECK(std::abs(mc["value_float"].get<double>() - exact) <=
          mc["mc"]["ci_halfwidth"].get<double>());

    CHECK(run({"solve", "--in", tmp("inst.json"), "--mc", "--samples", "0", "--ordering",
               tmp("ord.json")}) == 1);
    CHECK(run({"solve", "--in", tmp("inst.json"), "--mc", "--samples", "10"}) == 1);
}

TEST_CASE("gadget composes and solve reports the exact optimum") {
    Scratch tmp("gadget");
    OcspInstance one;
    one.add_variable("x");
    one.add_variable("y");
    one.add_variable("z");
    one.add_constraint({0, 1, 2}, one.add_predicate(OrderingPredicate::nbtw()), Rational(1));
    write_file(tmp("nbtw.json"), render_json(instance_to_json(one)));

    CHECK(run({"gadget", "--in", tmp("nbtw.json"), "--out", tmp("mas.json"), "--report",
               tmp("g.json")}) == 0);
    CHECK(run({"solve", "--in", tmp("mas.json"), "--exact", "--ordering-out",
               tmp("best.json"), "--report", tmp("s.json")}) == 0);
    CHECK(report_of(tmp("s.json"))["value"] == "5/6");

    // the reported optimum is attained by the ordering it wrote
    const OcspInstance mas =
        instance_from_json(parse_json(read_file(tmp("mas.json")), "mas"));
    const Ordering best = ordering_from_json(parse_json(read_file(tmp("best.json")), "b"));
    CHECK(ordering_value(mas, best) == frac(5, 6));

    // gadget on a non not-middle instance is an input error
    OcspInstance masin;
    masin.add_variable("a");
    masin.add_variable("b");
    masin.add_constraint({0, 1}, masin.add_predicate(OrderingPredicate::mas()), Rational(1));
    write_file(tmp("mas_in.json"), render_json(instance_to_json(masin)));
    CHECK(run({"gadget", "--in", tmp("mas_in.json"), "--out", tmp("no.json")}) == 1);
}

TEST_CASE("dist-verify exit codes") {
    Scratch tmp("dist");
    CHECK(run({"dist-verify", "nbtw:5", "--report", tmp("ok.json")}) == 0);
    const Json rep = report_of(tmp("ok.json"));
    CHECK(rep["pairwise_independent"] == true);
    CHECK(rep["required_ok"] == true);
    CHECK(rep["payoff_bound_ok"] == true);

    // chi-square on the exact sampler passes
    CHECK(run({"dist-verify", "btw:3", "--chi-samples", "20000", "--seed", "2", "--report",
               tmp("chi.json")}) == 0);
    CHECK(report_of(tmp("chi.json"))["chi_square"]["pass"] == true);

    // a lopsided pmf fails the uniform-marginal requirement: exit 2
    const Json bad = {{"t", 1},
                      {"m", 3},
                      {"Q1", {0, 1}},
                      {"Q2", {0, 1}},
                      {"atoms", {{{"tuple", {0, 0, 0}}, {"p", "1"}}}}};
    write_file(tmp("bad.json"), render_json(bad));
    CHECK(run({"dist-verify", "--dist", tmp("bad.json"), "--report", tmp("bad_rep.json")}) ==
          2);
    CHECK(report_of(tmp("bad_rep.json"))["required_ok"] == false);

    // nonsense spec: exit 1
    CHECK(run({"dist-verify", "zeta:3"}) == 1);
}

TEST_CASE("analysis-verify flows") {
    Scratch tmp("ana");
    CHECK(run({"analysis-verify", "hc", "--gamma", "0.3", "--random", "25", "--q", "2",
               "--dim", "3", "--seed", "5", "--report", tmp("hc.json")}) == 0);
    CHECK(report_of(tmp("hc.json"))["violations"] == 0);

    const FiniteFunction<long long> dict{ProductSpace::uniform(1, 2), {0, 1}};
    write_file(tmp("f.json"), render_json(function_to_json(dict)));

    CHECK(run({"analysis-verify", "hc", "--gamma", "0.3", "--fn", tmp("f.json"), "--report",
               tmp("hcf.json")}) == 0);

    CHECK(run({"analysis-verify", "influence", "--fn", tmp("f.json"), "--gamma", "1/4",
               "--report", tmp("inf.json")}) == 0);
    const Json inf = report_of(tmp("inf.json"));
    CHECK(inf["total"] == "9/64");  // (1-gamma)^2 / 4 for a fair-bit dictator
    CHECK(inf["sum_at_most_variance_over_gamma"] == true);

    CHECK(run({"analysis-verify", "bucketing", "--f", tmp("f.json"), "--g", tmp("f.json"),
               "--base", "nbtw:2", "--gamma", "1/4", "--pi", "0", "--Gamma", "2",
               "--report", tmp("b.json")}) == 0);
    CHECK(report_of(tmp("b.json"))["pass"] == true);

    CHECK(run({"analysis-verify", "decoupling", "--f", tmp("f.json"), "--g", tmp("f.json"),
               "--base", "nbtw:2", "--gamma", "1/4", "--pi", "0", "--Gamma", "2",
               "--report", tmp("d.json")}) == 0);
    const Json dec = report_of(tmp("d.json"));
    CHECK(dec["pass"] == true);
    CHECK(dec["lhs_float"].is_null() == false);

    // bad bucket count: DivisibilityError is an input error, exit 1
    CHECK(run({"analysis-verify", "bucketing", "--f", tmp("f.json"), "--g", tmp("f.json"),
               "--base", "nbtw:2", "--gamma", "1/4", "--pi", "0", "--Gamma", "3"}) == 1);
}

TEST_CASE("decode determinism and report") {
    Scratch tmp("dec");
    CHECK(run({"gen-lc", "--nu", "1", "--nv", "1", "--L", "2", "--R", "2", "--edges", "1",
               "--plant", "--seed", "3", "--out", tmp("lc.json"), "--planted-out",
               tmp("lab.json"), "--report", tmp("g.json")}) == 0);
    CHECK(run({"dictate", "--in", tmp("lc.json"), "--labeling", tmp("lab.json"), "--base",
               "nbtw:2", "--out", tmp("asg.json"), "--report", tmp("d.json")}) == 0);

    for (const char* out : {"lab1.json", "lab2.json"}) {
        CHECK(run({"decode", "--assignment", tmp("asg.json"), "--lc", tmp("lc.json"),
                   "--Gamma", "2", "--gamma", "1/4", "--seed", "77", "--out", tmp(out),
                   "--report", tmp(std::string("r_") + out)}) == 0);
    }
    CHECK(read_file(tmp("lab1.json")) == read_file(tmp("lab2.json")));
    const Json rep = parse_json(read_file(tmp("r_lab1.json")), "rep");
    CHECK(rep["report"]["agreement_bound"].is_string());
    CHECK(rep["outputs"].contains(tmp("lab1.json")));
}

TEST_CASE("identical config gives byte-identical reports") {
    Scratch tmp("bytes");
    CHECK(run({"gen-lc", "--nu", "2", "--nv", "2", "--L", "2", "--R", "2", "--edges", "3",
               "--seed", "12", "--out", tmp("lc.json"), "--report", tmp("g.json")}) == 0);
    CHECK(run({"overlay", "--in", tmp("lc.json"), "--q", "3", "--gamma", "1/10", "--out",
               tmp("ovl.json"), "--report", tmp("o1.json")}) == 0);
    const std::string first = read_file(tmp("o1.json"));
    const std::string inst_bytes = read_file(tmp("ovl.json"));
    CHECK(run({"overlay", "--in", tmp("lc.json"), "--q", "3", "--gamma", "1/10", "--out",
               tmp("ovl.json"), "--report", tmp("o2.json")}) == 0);
    CHECK(read_file(tmp("o2.json")) == first);
    CHECK(read_file(tmp("ovl.json")) == inst_bytes);

    // csv rendering: one header line, one data line
    CHECK(run({"eval", "--in", tmp("ovl.json"), "--ordering", tmp("ord.json"), "--report",
               tmp("e.csv"), "--format", "csv"}) == 1);  // ordering missing on disk
    const OcspInstance ovl =
        instance_from_json(parse_json(read_file(tmp("ovl.json")), "ovl"));
    Ordering ord;
    long long r = 0;
    for (const auto& name : ovl.variables()) ord.ranks[name] = r++;
    write_file(tmp("ord.json"), render_json(ordering_to_json(ord)));
    CHECK(run({"eval", "--in", tmp("ovl.json"), "--ordering", tmp("ord.json"), "--report",
               tmp("e.csv"), "--format", "csv"}) == 0);
    const std::string csv = read_file(tmp("e.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.rfind("config.format", 0) == 0);
}
