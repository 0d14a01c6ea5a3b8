#include "ocsp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>

#include "ocsp/analysis.hpp"
#include "ocsp/dictatorship.hpp"
#include "ocsp/io.hpp"
#include "ocsp/label_cover.hpp"
#include "ocsp/reduction.hpp"
#include "ocsp/solvers.hpp"

namespace ocsp {

namespace {

int default_workers() {
    const char* raw = std::getenv("OCSPLAB_WORKERS");
    if (raw == nullptr) return 1;
    const int v = std::atoi(raw);
    return v >= 1 ? v : 1;
}

// One invocation's artifacts: the config echo, input/output hashes, and the
// verb's own report, rendered as one envelope to --report or stdout.
struct Run {
    Json config = Json::object();
    Json inputs = Json::object();
    Json outputs = Json::object();
    Json report = Json::object();
    std::string report_path;
    std::string format = "json";

    Json load_json(const std::string& path) {
        const std::string bytes = read_file(path);
        inputs[path] = git_blob_sha1(bytes);
        return parse_json(bytes, path);
    }

    void save(const std::string& path, const Json& j) {
        const std::string bytes = render_json(j);
        write_file(path, bytes);
        outputs[path] = git_blob_sha1(bytes);
    }

    int finish(bool ok) {
        const Json envelope = {{"config", config},
                               {"inputs", inputs},
                               {"outputs", outputs},
                               {"report", report}};
        const std::string bytes =
            format == "csv" ? render_csv(envelope) : render_json(envelope);
        if (report_path.empty())
            std::cout << bytes;
        else
            write_file(report_path, bytes);
        return ok ? 0 : 2;
    }
};

Rational parse_noise(const std::string& text) {
    const Rational g = parse_rational(text);
    if (g < 0 || g > 1) throw BadParameter("gamma must lie in [0,1]");
    return g;
}

// Default predicate and closed-form payoff bound for a named base spec.
struct SpecDefaults {
    std::optional<std::string> pred;
    std::optional<Rational> bound;
};

SpecDefaults spec_defaults(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    const auto num = [&](std::size_t i) { return std::stoll(parts[i]); };
    SpecDefaults out;
    try {
        if (parts[0] == "decouple" && parts.size() >= 2) {
            // payoff structure survives decoupling, the payoff bound does not
            out.pred = spec_defaults(spec.substr(spec.find(':') + 1)).pred;
        } else if (parts[0] == "btw" && parts.size() == 2) {
            out.pred = "BTW";
            out.bound = Rational(1) - Rational(1) / to_rational(num(1));
        } else if (parts[0] == "nbtw" && parts.size() == 2) {
            out.pred = "NBTW";
            out.bound = Rational(1) - Rational(3) / to_rational(num(1));
        } else if (parts[0] == "nbtw" && parts.size() == 3) {
            out.pred = "NBTW_" + parts[2];
            out.bound = Rational(1) - Rational(3) / to_rational(num(1));
        } else if (parts[0] == "so" && parts.size() == 4) {
            out.pred = "SO_" + std::to_string(2 * num(1));
            const Rational t = to_rational(num(1)), a = to_rational(num(2)),
                           b = to_rational(num(3));
            out.bound = Rational(1) - t * t / (2 * a) - a / b;
        }
    } catch (const std::exception&) {
        // distribution_by_spec reports malformed specs; no defaults here
    }
    return out;
}

// Shared "--base SPEC xor --dist FILE" resolution.
struct BaseChoice {
    std::string spec;
    std::string file;

    BaseDistribution resolve(Run& run) const {
        if (spec.empty() == file.empty())
            throw BadParameter("give exactly one of --base and --dist");
        if (!spec.empty()) return distribution_by_spec(spec);
        return distribution_from_json(run.load_json(file));
    }

    OrderingPredicate predicate(const std::string& flag) const {
        if (!flag.empty()) return OrderingPredicate::by_name(flag);
        if (!spec.empty()) {
            const SpecDefaults d = spec_defaults(spec);
            if (d.pred) return OrderingPredicate::by_name(*d.pred);
        }
        throw BadParameter("--pred is required when the predicate cannot be inferred");
    }
};

Json mc_json(const McStats& mc) {
    return {{"mean", mc.mean},
            {"stddev", mc.stddev},
            {"ci_halfwidth", mc.ci_halfwidth},
            {"n", mc.n}};
}

Json exponent_json(const ExponentChoice& e) {
    Json j;
    j["formula_min_alphabet"] =
        e.formula_min_alphabet ? Json(*e.formula_min_alphabet) : Json();
    j["formula_max_alphabet"] =
        e.formula_max_alphabet ? Json(*e.formula_max_alphabet) : Json();
    j["exact_min_alphabet"] = e.exact_min_alphabet;
    j["exact_max_alphabet"] = e.exact_max_alphabet;
    j["delta_used"] = e.delta_used;
    j["formula_vacuous"] = e.formula_vacuous;
    j["pair_exponent"] = e.pair_exponent;
    return j;
}

void put_value(Json& report, const char* key, const Rational& v) {
    report[key] = format_rational(v);
    report[std::string(key) + "_float"] = to_double(v);
}

// Constraint sampler over a materialized instance: constraints drawn with
// probability proportional to weight, ranks resolved once up front.
RankedSampler instance_sampler(OcspInstance inst, const Ordering& ord) {
    struct State {
        OcspInstance inst;
        std::vector<double> cum;
        std::vector<RankedConstraint> cons;
    };
    auto st = std::make_shared<State>();
    st->inst = std::move(inst);
    if (st->inst.constraints().empty()) throw BadParameter("instance has no constraints");
    const double total = to_double(st->inst.weight_total());
    double acc = 0;
    for (const auto& c : st->inst.constraints()) {
        RankedConstraint rc;
        rc.pred = &st->inst.predicates()[c.pred];
        for (int v : c.vars) {
            const auto it = ord.ranks.find(st->inst.variables()[v]);
            if (it == ord.ranks.end())
                throw UnrankedVariable("no rank for variable " + st->inst.variables()[v]);
            rc.tuple.push_back(it->second);
        }
        st->cons.push_back(std::move(rc));
        acc += to_double(c.weight) / total;
        st->cum.push_back(acc);
    }
    st->cum.back() = 1.0;
    return [st](Rng& rng) {
        const double u = rng_unit(rng);
        const auto it = std::lower_bound(st->cum.begin(), st->cum.end(), u);
        return st->cons[it == st->cum.end() ? st->cons.size() - 1 : it - st->cum.begin()];
    };
}

FiniteFunction<Rational> to_rational_table(const FiniteFunction<long long>& f) {
    std::vector<Rational> values;
    values.reserve(f.values.size());
    for (long long v : f.values) values.push_back(to_rational(v));
    return FiniteFunction<Rational>{f.space, std::move(values)};
}

Json property_report_json(const PropertyReport& rep, bool payoff_known) {
    Json j;
    j["pmf_valid"] = rep.pmf_valid;
    j["alphabets_respected"] = rep.alphabets_respected;
    j["uniform_marginals"] = rep.uniform_marginals;
    j["suffix_coords_indep_of_prefix"] = rep.suffix_coords_indep_of_prefix;
    j["pairwise_independent"] = rep.pairwise_independent;
    Json pairs = Json::array();
    for (const auto& [a, b] : rep.exchangeable_suffix_pairs) pairs.push_back({a, b});
    j["exchangeable_suffix_pairs"] = std::move(pairs);
    if (payoff_known) put_value(j, "expected_payoff", rep.expected_payoff);
    j["payoff_lower_bound"] =
        rep.payoff_lower_bound ? Json(format_rational(*rep.payoff_lower_bound)) : Json();
    j["payoff_bound_ok"] = rep.payoff_bound_ok ? Json(*rep.payoff_bound_ok) : Json();
    j["required_ok"] = rep.required_ok();
    j["witnesses"] = rep.witnesses;
    return j;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"ordering-CSP toolkit: generation, reduction, solving, verification"};
    app.require_subcommand(1);
    int result = 0;

    // shared option storage; each verb binds the subset it uses
    struct {
        std::string in, out, report, format = "json";
        std::string gamma = "0", pred, bound, labeling, ordering, ordering_out, planted_out;
        std::string fn_path, f_path, g_path;
        BaseChoice base;
        int nu = 2, nv = 2, L = 2, R = 2, edge_count = 4;
        int q = 3, buckets = 2, dim = 3, random_fns = 0;
        long long cap = 1LL << 20, solve_cap = 10, samples = 100000, max_iters = 10000;
        long long chi_samples = 0;
        std::uint64_t seed = kDefaultSeed;
        int workers = default_workers();
        bool plant = false, use_exact = false, use_local = false, use_mc = false;
        std::vector<int> pi;
    } o;

    const auto common = [&](CLI::App* cmd) {
        cmd->add_option("--report", o.report, "write the report here instead of stdout");
        cmd->add_option("--format", o.format, "report format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    const auto start = [&](const char* verb) {
        Run run;
        run.report_path = o.report;
        run.format = o.format;
        run.config["verb"] = verb;
        run.config["format"] = o.format;
        return run;
    };

    // ---- gen-lc ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen-lc", "generate a random projection game");
    gen->add_option("--nu", o.nu, "left vertices")->check(CLI::PositiveNumber);
    gen->add_option("--nv", o.nv, "right vertices")->check(CLI::PositiveNumber);
    gen->add_option("--L", o.L, "left label count")->check(CLI::PositiveNumber);
    gen->add_option("--R", o.R, "right label count")->check(CLI::PositiveNumber);
    gen->add_option("--edges", o.edge_count, "edge count")->check(CLI::PositiveNumber);
    gen->add_flag("--plant", o.plant, "plant a perfect labeling");
    gen->add_option("--seed", o.seed, "rng seed");
    gen->add_option("--out", o.out, "label-cover output path")->required();
    gen->add_option("--planted-out", o.planted_out, "write the planted labeling here");
    common(gen);
    gen->callback([&] {
        Run run = start("gen-lc");
        run.config["nu"] = o.nu;
        run.config["nv"] = o.nv;
        run.config["L"] = o.L;
        run.config["R"] = o.R;
        run.config["edges"] = o.edge_count;
        run.config["plant"] = o.plant;
        run.config["seed"] = o.seed;
        const GeneratedLc gen_out =
            gen_label_cover(o.nu, o.nv, o.L, o.R, o.edge_count, o.plant, o.seed);
        run.save(o.out, label_cover_to_json(gen_out.lc));
        run.report["is_planted"] = gen_out.is_planted;
        if (gen_out.is_planted) {
            put_value(run.report, "planted_value", lc_value(gen_out.lc, gen_out.planted));
            if (!o.planted_out.empty())
                run.save(o.planted_out, labeling_to_json(gen_out.planted));
        }
        result = run.finish(true);
    });

    // ---- reduce ----------------------------------------------------------
    auto* red = app.add_subcommand("reduce", "compile a projection game into an ordering CSP");
    red->add_option("--in", o.in, "label-cover input")->required();
    red->add_option("--base", o.base.spec, "base distribution spec (e.g. nbtw:3)");
    red->add_option("--dist", o.base.file, "base distribution file");
    red->add_option("--pred", o.pred, "predicate name (default: inferred from --base)");
    red->add_option("--gamma", o.gamma, "noise rate as an exact fraction")->required();
    red->add_option("--cap", o.cap, "dense-table cap");
    red->add_option("--out", o.out, "instance output path")->required();
    common(red);
    red->callback([&] {
        Run run = start("reduce");
        run.config["in"] = o.in;
        run.config["base"] = o.base.spec;
        run.config["dist"] = o.base.file;
        run.config["pred"] = o.pred;
        run.config["gamma"] = o.gamma;
        run.config["cap"] = o.cap;
        const LabelCoverInstance lc = label_cover_from_json(run.load_json(o.in));
        const BaseDistribution base = o.base.resolve(run);
        const OrderingPredicate pred = o.base.predicate(o.pred);
        const OcspInstance inst = reduce_lc(lc, base, parse_noise(o.gamma), pred, o.cap);
        run.save(o.out, instance_to_json(inst));
        run.report["variables"] = inst.variables().size();
        run.report["constraints"] = inst.constraints().size();
        put_value(run.report, "weight_total", inst.weight_total());
        result = run.finish(true);
    });

    // ---- overlay ---------------------------------------------------------
    auto* ovl = app.add_subcommand(
        "overlay", "compile the three-fold not-middle mixture sharing one variable set");
    ovl->add_option("--in", o.in, "label-cover input")->required();
    ovl->add_option("--q", o.q, "alphabet size")->check(CLI::PositiveNumber);
    ovl->add_option("--gamma", o.gamma, "noise rate as an exact fraction")->required();
    ovl->add_option("--cap", o.cap, "dense-table cap");
    ovl->add_option("--out", o.out, "instance output path")->required();
    common(ovl);
    ovl->callback([&] {
        Run run = start("overlay");
        run.config["in"] = o.in;
        run.config["q"] = o.q;
        run.config["gamma"] = o.gamma;
        run.config["cap"] = o.cap;
        const LabelCoverInstance lc = label_cover_from_json(run.load_json(o.in));
        const OcspInstance inst = overlay_nbtw(lc, o.q, parse_noise(o.gamma), o.cap);
        run.save(o.out, instance_to_json(inst));
        run.report["variables"] = inst.variables().size();
        run.report["constraints"] = inst.constraints().size();
        put_value(run.report, "weight_total", inst.weight_total());
        result = run.finish(true);
    });

    // ---- gadget ----------------------------------------------------------
    auto* gad = app.add_subcommand("gadget",
                                   "rewrite width-3 not-middle constraints into arcs");
    gad->add_option("--in", o.in, "instance input")->required();
    gad->add_option("--out", o.out, "instance output path")->required();
    common(gad);
    gad->callback([&] {
        Run run = start("gadget");
        run.config["in"] = o.in;
        const OcspInstance inst = instance_from_json(run.load_json(o.in));
        const OcspInstance out = nbtw_to_mas(inst);
        run.save(o.out, instance_to_json(out));
        run.report["variables"] = out.variables().size();
        run.report["constraints"] = out.constraints().size();
        result = run.finish(true);
    });

    // ---- dictate ---------------------------------------------------------
    auto* dic = app.add_subcommand("dictate",
                                   "build the dictator assignment of a labeling");
    dic->add_option("--in", o.in, "label-cover input")->required();
    dic->add_option("--labeling", o.labeling, "labeling input")->required();
    dic->add_option("--base", o.base.spec, "base distribution spec (for the alphabets)");
    dic->add_option("--dist", o.base.file, "base distribution file");
    dic->add_option("--out", o.out, "assignment output path")->required();
    dic->add_option("--ordering-out", o.ordering_out, "also write the induced ordering");
    common(dic);
    dic->callback([&] {
        Run run = start("dictate");
        run.config["in"] = o.in;
        run.config["labeling"] = o.labeling;
        run.config["base"] = o.base.spec;
        run.config["dist"] = o.base.file;
        const LabelCoverInstance lc = label_cover_from_json(run.load_json(o.in));
        const Labeling lab = labeling_from_json(run.load_json(o.labeling));
        const BaseDistribution base = o.base.resolve(run);
        const Assignment asg = dictator_assignment(lc, lab, base.q1(), base.q2());
        run.save(o.out, assignment_to_json(asg));
        if (!o.ordering_out.empty())
            run.save(o.ordering_out,
                     ordering_to_json(assignment_ordering(lc, asg, base.q1(), base.q2())));
        put_value(run.report, "labeling_value", lc_value(lc, lab));
        result = run.finish(true);
    });

    // ---- solve -----------------------------------------------------------
    auto* sol = app.add_subcommand("solve", "maximize or estimate an instance value");
    sol->add_option("--in", o.in, "instance input")->required();
    auto* fe = sol->add_flag("--exact", o.use_exact, "exhaustive search (default)");
    auto* fl = sol->add_flag("--local", o.use_local, "seeded hill climbing");
    auto* fm = sol->add_flag("--mc", o.use_mc, "Monte-Carlo evaluation of --ordering");
    fe->excludes(fl, fm);
    fl->excludes(fm);
    sol->add_option("--cap", o.solve_cap, "variable cap for exhaustive search");
    sol->add_option("--seed", o.seed, "rng seed");
    sol->add_option("--samples", o.samples, "Monte-Carlo sample count");
    sol->add_option("--max-iters", o.max_iters, "local-search move budget");
    sol->add_option("--workers", o.workers, "worker threads");
    sol->add_option("--ordering", o.ordering, "ordering to evaluate (--mc)");
    sol->add_option("--ordering-out", o.ordering_out, "write the best ordering found");
    common(sol);
    sol->callback([&] {
        Run run = start("solve");
        run.config["in"] = o.in;
        run.config["seed"] = o.seed;
        run.config["workers"] = o.workers;
        const OcspInstance inst = instance_from_json(run.load_json(o.in));
        const Rational total = inst.weight_total();
        const auto normalized = [&](const Rational& v) {
            return total == 0 ? v : Rational(v / total);
        };
        if (o.use_mc) {
            run.config["method"] = "mc";
            run.config["samples"] = o.samples;
            if (o.samples < 1) throw BadParameter("--samples must be at least 1");
            if (o.ordering.empty()) throw BadParameter("--mc needs --ordering");
            run.config["ordering"] = o.ordering;
            const Ordering ord = ordering_from_json(run.load_json(o.ordering));
            const McStats mc = monte_carlo_value(instance_sampler(inst, ord), o.samples,
                                                 o.seed, o.workers);
            run.report["method"] = "mc";
            run.report["seed"] = o.seed;
            run.report["samples"] = mc.n;
            run.report["value_float"] = mc.mean;
            run.report["mc"] = mc_json(mc);
        } else {
            const bool local = o.use_local;
            run.config["method"] = local ? "local" : "exact";
            if (local) run.config["max_iters"] = o.max_iters;
            if (!local) run.config["cap"] = o.solve_cap;
            const SolveReport rep = local
                                        ? local_search(inst, o.seed, o.max_iters)
                                        : exact_solve(inst, static_cast<int>(o.solve_cap));
            run.report["method"] = local ? "local" : "exact";
            run.report["seed"] = o.seed;
            if (local) run.report["iterations"] = rep.iterations;
            put_value(run.report, "value", normalized(rep.value));
            put_value(run.report, "weighted_sum", rep.value);
            run.report["warnings"] = rep.warnings;
            if (!o.ordering_out.empty()) run.save(o.ordering_out, ordering_to_json(rep.best));
        }
        put_value(run.report, "weight_total", total);
        result = run.finish(true);
    });

    // ---- eval ------------------------------------------------------------
    auto* evl = app.add_subcommand("eval", "exact value of an ordering on an instance");
    evl->add_option("--in", o.in, "instance input")->required();
    evl->add_option("--ordering", o.ordering, "ordering input")->required();
    common(evl);
    evl->callback([&] {
        Run run = start("eval");
        run.config["in"] = o.in;
        run.config["ordering"] = o.ordering;
        const OcspInstance inst = instance_from_json(run.load_json(o.in));
        const Ordering ord = ordering_from_json(run.load_json(o.ordering));
        const Rational raw = ordering_value(inst, ord);
        const Rational total = inst.weight_total();
        put_value(run.report, "weighted_sum", raw);
        put_value(run.report, "weight_total", total);
        put_value(run.report, "value", total == 0 ? raw : Rational(raw / total));
        result = run.finish(true);
    });

    // ---- dist-verify -----------------------------------------------------
    auto* dvf = app.add_subcommand("dist-verify",
                                   "check the dictatorship-test preconditions");
    dvf->add_option("spec", o.base.spec, "distribution spec (e.g. nbtw:5)");
    dvf->add_option("--dist", o.base.file, "distribution file");
    dvf->add_option("--pred", o.pred, "payoff predicate name");
    dvf->add_option("--bound", o.bound, "payoff lower bound as a fraction");
    dvf->add_option("--chi-samples", o.chi_samples, "sampler chi-square sample count");
    dvf->add_option("--seed", o.seed, "rng seed");
    common(dvf);
    dvf->callback([&] {
        Run run = start("dist-verify");
        run.config["spec"] = o.base.spec;
        run.config["dist"] = o.base.file;
        run.config["pred"] = o.pred;
        run.config["bound"] = o.bound;
        run.config["chi_samples"] = o.chi_samples;
        run.config["seed"] = o.seed;
        const BaseDistribution d = o.base.resolve(run);
        const SpecDefaults defaults =
            o.base.spec.empty() ? SpecDefaults{} : spec_defaults(o.base.spec);
        std::optional<OrderingPredicate> pred;
        if (!o.pred.empty())
            pred = OrderingPredicate::by_name(o.pred);
        else if (defaults.pred)
            pred = OrderingPredicate::by_name(*defaults.pred);
        std::optional<Rational> bound;
        if (!o.bound.empty())
            bound = parse_rational(o.bound);
        else if (o.pred.empty())
            bound = defaults.bound;
        const PropertyReport rep =
            verify_distribution(d, pred ? &*pred : nullptr, bound);
        run.report = property_report_json(rep, pred.has_value());
        bool ok = rep.required_ok() && rep.payoff_bound_ok.value_or(true);
        if (o.chi_samples > 0) {
            const ChiSquare chi = sampler_chi_square(d, o.chi_samples, o.seed);
            run.report["chi_square"] = {{"statistic", chi.statistic},
                                        {"threshold", chi.threshold},
                                        {"df", chi.df},
                                        {"pass", chi.pass}};
            ok = ok && chi.pass;
        }
        result = run.finish(ok);
    });

    // ---- analysis-verify -------------------------------------------------
    auto* avf = app.add_subcommand("analysis-verify", "numeric checks of the bounds");
    avf->require_subcommand(1);

    auto* hc = avf->add_subcommand("hc", "noised-norm inequality");
    hc->add_option("--fn", o.fn_path, "function file to check");
    hc->add_option("--gamma", o.gamma, "noise rate")->required();
    hc->add_option("--random", o.random_fns, "check this many random functions instead");
    hc->add_option("--q", o.q, "alphabet size for random functions");
    hc->add_option("--dim", o.dim, "dimension for random functions");
    hc->add_option("--seed", o.seed, "rng seed");
    common(hc);
    hc->callback([&] {
        Run run = start("analysis-verify");
        run.config["check"] = "hc";
        run.config["fn"] = o.fn_path;
        run.config["gamma"] = o.gamma;
        run.config["random"] = o.random_fns;
        run.config["q"] = o.q;
        run.config["dim"] = o.dim;
        run.config["seed"] = o.seed;
        const double gamma = to_double(parse_noise(o.gamma));
        const auto hc_json = [](const HcReport& rep) {
            return Json{{"gamma", rep.gamma},   {"alpha", rep.alpha},
                        {"delta", rep.delta},   {"delta_exact", rep.delta_exact},
                        {"vacuous", rep.vacuous}, {"lhs", rep.lhs},
                        {"lhs_exact", rep.lhs_exact}, {"rhs", rep.rhs},
                        {"pass", rep.pass},     {"pass_exact", rep.pass_exact}};
        };
        const auto holds = [](const HcReport& rep) {
            return rep.pass_exact && (rep.vacuous || rep.pass);
        };
        bool ok = true;
        if (!o.fn_path.empty()) {
            const HcReport rep = verify_hc(
                to_rational_table(function_from_json(run.load_json(o.fn_path))), gamma);
            run.report = hc_json(rep);
            ok = holds(rep);
        } else {
            if (o.random_fns < 1) throw BadParameter("give --fn or --random N");
            Rng rng(o.seed);
            int violations = 0;
            const ProductSpace sp = ProductSpace::uniform(o.dim, o.q);
            for (int i = 0; i < o.random_fns; ++i) {
                std::vector<Rational> values(sp.size());
                for (auto& v : values)
                    v = frac(static_cast<long>(rng_below(rng, 101)) - 50,
                             1 + static_cast<long>(rng_below(rng, 8)));
                const HcReport rep = verify_hc(FiniteFunction<Rational>{sp, values}, gamma);
                if (!holds(rep)) {
                    ++violations;
                    if (violations == 1) run.report["first_failure"] = hc_json(rep);
                }
            }
            run.report["runs"] = o.random_fns;
            run.report["violations"] = violations;
            ok = violations == 0;
        }
        result = run.finish(ok);
    });

    const auto add_pair_check = [&](const char* name, const char* help) {
        auto* cmd = avf->add_subcommand(name, help);
        cmd->add_option("--f", o.f_path, "left table file")->required();
        cmd->add_option("--g", o.g_path, "right table file")->required();
        cmd->add_option("--base", o.base.spec, "base distribution spec");
        cmd->add_option("--dist", o.base.file, "base distribution file");
        cmd->add_option("--pred", o.pred, "predicate name (default: inferred)");
        cmd->add_option("--gamma", o.gamma, "noise rate")->required();
        cmd->add_option("--pi", o.pi, "projection, one left label per right label")
            ->required()
            ->delimiter(',');
        cmd->add_option("--Gamma", o.buckets, "bucket count")->check(CLI::PositiveNumber);
        cmd->add_option("--cap", o.cap, "dense-table cap");
        common(cmd);
        return cmd;
    };

    auto* buc = add_pair_check("bucketing", "bucketed-payoff loss bound");
    buc->callback([&] {
        Run run = start("analysis-verify");
        run.config["check"] = "bucketing";
        run.config["f"] = o.f_path;
        run.config["g"] = o.g_path;
        run.config["base"] = o.base.spec;
        run.config["dist"] = o.base.file;
        run.config["gamma"] = o.gamma;
        run.config["pi"] = o.pi;
        run.config["Gamma"] = o.buckets;
        const auto f = function_from_json(run.load_json(o.f_path));
        const auto g = function_from_json(run.load_json(o.g_path));
        const BaseDistribution base = o.base.resolve(run);
        const TestDistribution td(base, parse_noise(o.gamma), o.pi, f.space.dimension());
        const BucketingLossReport rep =
            verify_bucketing_loss(f, g, td, o.base.predicate(o.pred), o.buckets, o.cap);
        put_value(run.report, "acceptance", rep.acceptance);
        put_value(run.report, "bucketed", rep.bucketed);
        put_value(run.report, "lhs", rep.lhs);
        run.report["rhs"] = rep.rhs;
        run.report["buckets"] = rep.buckets;
        run.report["m"] = rep.m;
        run.report["exponent"] = exponent_json(rep.exponent);
        run.report["pass"] = rep.pass;
        result = run.finish(rep.pass);
    });

    auto* dec = add_pair_check("decoupling", "decoupled-acceptance distance bound");
    dec->callback([&] {
        Run run = start("analysis-verify");
        run.config["check"] = "decoupling";
        run.config["f"] = o.f_path;
        run.config["g"] = o.g_path;
        run.config["base"] = o.base.spec;
        run.config["dist"] = o.base.file;
        run.config["gamma"] = o.gamma;
        run.config["pi"] = o.pi;
        run.config["Gamma"] = o.buckets;
        const auto f = function_from_json(run.load_json(o.f_path));
        const auto g = function_from_json(run.load_json(o.g_path));
        const BaseDistribution base = o.base.resolve(run);
        const TestDistribution td(base, parse_noise(o.gamma), o.pi, f.space.dimension());
        const DecouplingReport rep =
            verify_decoupling_bound(f, g, td, o.base.predicate(o.pred), o.buckets, o.cap);
        put_value(run.report, "acceptance", rep.acceptance);
        put_value(run.report, "acceptance_decoupled", rep.acceptance_decoupled);
        put_value(run.report, "lhs", rep.lhs);
        run.report["coinf_sqrt_sum"] = rep.coinf_sqrt_sum;
        run.report["main_term"] = rep.main_term;
        run.report["tail_term"] = rep.tail_term;
        run.report["rhs"] = rep.rhs;
        run.report["buckets"] = rep.buckets;
        run.report["m"] = rep.m;
        run.report["exponent"] = exponent_json(rep.exponent);
        run.report["pass"] = rep.pass;
        result = run.finish(rep.pass);
    });

    auto* inf = avf->add_subcommand("influence", "noisy-influence bounds for one table");
    inf->add_option("--fn", o.fn_path, "function file")->required();
    inf->add_option("--gamma", o.gamma, "noise rate")->required();
    common(inf);
    inf->callback([&] {
        Run run = start("analysis-verify");
        run.config["check"] = "influence";
        run.config["fn"] = o.fn_path;
        run.config["gamma"] = o.gamma;
        const Rational gamma = parse_noise(o.gamma);
        if (gamma == 0) throw BadParameter("influence check needs gamma > 0");
        const auto f = to_rational_table(function_from_json(run.load_json(o.fn_path)));
        const std::vector<Rational> inf_v = noisy_influences(f, gamma);
        const Rational var = variance(f);
        Rational total(0);
        bool each_ok = true;
        Json list = Json::array();
        for (const Rational& v : inf_v) {
            list.push_back(format_rational(v));
            total += v;
            each_ok = each_ok && v <= var;
        }
        const bool sum_ok = gamma * total <= var;
        run.report["influences"] = std::move(list);
        put_value(run.report, "total", total);
        put_value(run.report, "variance", var);
        run.report["each_at_most_variance"] = each_ok;
        run.report["sum_at_most_variance_over_gamma"] = sum_ok;
        result = run.finish(each_ok && sum_ok);
    });

    // ---- decode ----------------------------------------------------------
    auto* dcd = app.add_subcommand("decode", "randomized labeling extraction");
    dcd->add_option("--assignment", o.in, "assignment input")->required();
    dcd->add_option("--lc", o.labeling, "label-cover input")->required();
    dcd->add_option("--Gamma", o.buckets, "bucket count")->check(CLI::PositiveNumber);
    dcd->add_option("--gamma", o.gamma, "noise rate")->required();
    dcd->add_option("--seed", o.seed, "rng seed");
    dcd->add_option("--out", o.out, "labeling output path");
    common(dcd);
    dcd->callback([&] {
        Run run = start("decode");
        run.config["assignment"] = o.in;
        run.config["lc"] = o.labeling;
        run.config["Gamma"] = o.buckets;
        run.config["gamma"] = o.gamma;
        run.config["seed"] = o.seed;
        const Assignment asg = assignment_from_json(run.load_json(o.in));
        const LabelCoverInstance lc = label_cover_from_json(run.load_json(o.labeling));
        const Rational gamma = parse_noise(o.gamma);
        Rng rng(o.seed);
        const Labeling lab = decode_labeling(asg, lc, o.buckets, gamma, rng);
        if (!o.out.empty()) run.save(o.out, labeling_to_json(lab));
        run.report["labeling"] = labeling_to_json(lab);
        put_value(run.report, "labeling_value", lc_value(lc, lab));
        put_value(run.report, "agreement_bound",
                  decode_agreement_bound(asg, lc, o.buckets, gamma));
        result = run.finish(true);
    });

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return result;
}

int cli_run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_run(args);
}

}  // namespace ocsp
