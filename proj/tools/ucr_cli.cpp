// ucr: command-line front end for unit commitment solves and restriction experiments.
//
// Exit codes: 0 ok, 2 parse or schema error (including bad flags), 3 validation or
// semantic error (missing history, missing LLM config), 4 infeasible, 5 time or node
// limit, 10 internal error.
//
// Seeds: every random choice derives from --seed. Sweep trial (i, k) perturbs demand
// with split_seed(seed, i*trials + k) and seeds method generators with
// split_seed(seed, same stream). Long-horizon day d uses split_seed(seed, d) for its
// demand and history day k uses split_seed(seed, k).

#include "ucr/error.hpp"
#include "ucr/formulation.hpp"
#include "ucr/freeze_mask.hpp"
#include "ucr/harness.hpp"
#include "ucr/instance.hpp"
#include "ucr/maskgen.hpp"
#include "ucr/restriction.hpp"
#include "ucr/solver.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ucr;

namespace {

enum Exit { ok = 0, parse_fail = 2, invalid = 3, infeasible = 4, limit = 5, internal = 10 };

struct Options {
    std::string instance;
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    double gap = 1e-4;
    double time_limit = 0.0;
    long node_limit = 0;
    bool no_timing = false;
    int jobs = 1;

    std::string method = "stability";
    std::string methods = "random,stability";
    std::string history;
    int H = 5;
    int k_cap = 0;
    int k_neighbors = 5;
    int clusters = 0;
    double ratio = 0.1;
    std::string llm_config;
    bool screen = false;
    bool validate = false;
    int revisions = 1;

    std::string sigmas = "0.1,0.2,0.3,0.4";
    int trials = 5;
    int days = 30;
    double sigma = 0.05;
    bool carry = false;
    std::string solution;
    std::string output;
};

MilpParams milp_params(const Options& o) {
    MilpParams p;
    p.gap_tol = o.gap;
    if (o.time_limit > 0) p.time_limit = o.time_limit;
    if (o.node_limit > 0) p.node_limit = o.node_limit;
    p.seed = 0;
    return p;
}

MethodConfig method_config(const Options& o) {
    MethodConfig c;
    c.H = o.H;
    if (o.k_cap > 0) c.k_cap = o.k_cap;
    c.k_neighbors = o.k_neighbors;
    c.n_clusters = o.clusters;
    c.ratio = o.ratio;
    c.seed = o.seed;
    if (!o.llm_config.empty()) c.llm = load_llm_config(o.llm_config);
    return c;
}

PipelineOptions pipeline_options(const Options& o) {
    PipelineOptions p;
    p.screen = o.screen;
    p.validate = o.validate;
    p.max_retries = o.revisions;
    return p;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + item + "'");
        }
    }
    return out;
}

bool needs_history(const std::string& name) {
    return name == "stability" || name == "knn" || name == "kmeans";
}

HistoryBank history_for(const Options& o, const std::vector<std::string>& methods) {
    bool required = false;
    for (const auto& m : methods) required = required || needs_history(m);
    if (o.history.empty()) {
        if (required) throw SemanticError("the selected method needs a history file (--history)");
        return {};
    }
    return load_history(o.history);
}

void check_method_prereqs(const Options& o, const std::vector<std::string>& methods) {
    for (const auto& m : methods) {
        if (m == kBaselineMethod) throw SemanticError("'baseline' is always run and cannot be listed as a method");
        if (m == "llm" && o.llm_config.empty())
            throw SemanticError("method 'llm' requires an endpoint configuration (--llm-config)");
    }
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
}

json stats_json(const SolveStats& s, bool timing) {
    json j = {{"status", milp_status_name(s.status)},
              {"nodes", s.nodes},
              {"simplex_iters", s.simplex_iters},
              {"solve_time_s", timing ? s.wall_time : 0.0}};
    auto put = [&j](const char* key, double v) { j[key] = std::isfinite(v) ? json(v) : json(nullptr); };
    put("gap", s.gap);
    put("root_bound", s.root_bound);
    put("best_bound", s.best_bound);
    return j;
}

json assignment_json(const UcInstance& inst, const UcAssignment& a) {
    auto by_gen = [&inst](const std::vector<std::vector<double>>& m) {
        json o = json::object();
        for (std::size_t g = 0; g < inst.generators.size(); ++g) o[inst.generators[g].id] = m[g];
        return o;
    };
    json f = json::object(), th = json::object();
    for (std::size_t l = 0; l < inst.lines.size(); ++l) f[inst.lines[l].id] = a.f[l];
    for (std::size_t n = 0; n < inst.buses.size(); ++n) th[inst.buses[n]] = a.theta[n];
    return {{"u", by_gen(a.u)}, {"v", by_gen(a.v)}, {"w", by_gen(a.w)}, {"p", by_gen(a.p)}, {"f", f}, {"theta", th}};
}

UcAssignment assignment_from_json(const UcInstance& inst, const json& doc) {
    UcAssignment a;
    auto read = [](const json& obj, const std::string& key, const std::string& id, std::size_t len) {
        if (!obj.contains(key) || !obj[key].is_object() || !obj[key].contains(id))
            throw SchemaError("solution: missing " + key + "." + id);
        auto v = obj[key][id].get<std::vector<double>>();
        if (v.size() != len) throw DimensionError("solution: " + key + "." + id + " has the wrong length");
        return v;
    };
    const auto T = static_cast<std::size_t>(inst.horizon);
    for (const auto& g : inst.generators) {
        a.u.push_back(read(doc, "u", g.id, T));
        a.v.push_back(read(doc, "v", g.id, T));
        a.w.push_back(read(doc, "w", g.id, T));
        a.p.push_back(read(doc, "p", g.id, T));
    }
    for (const auto& l : inst.lines) a.f.push_back(read(doc, "f", l.id, T));
    for (const auto& b : inst.buses) a.theta.push_back(read(doc, "theta", b, T));
    return a;
}

int status_exit(const MilpResult& r) {
    switch (r.stats.status) {
    case MilpStatus::optimal:
    case MilpStatus::gap_limit: return ok;
    case MilpStatus::infeasible: return infeasible;
    default: return limit;
    }
}

void report_status(const MilpResult& r) {
    if (r.stats.status == MilpStatus::time_limit || r.stats.status == MilpStatus::node_limit) {
        if (r.has_solution())
            std::printf("limit reached; best incumbent %.6f (bound %.6f)\n", r.objective, r.stats.best_bound);
        else
            std::printf("limit reached; no incumbent found\n");
    } else if (r.stats.status == MilpStatus::infeasible) {
        std::printf("problem is infeasible\n");
    }
}

void write_solution(const Options& o, const UcInstance& inst, const MilpProblem& prob, const MilpResult& r,
                    json extra_stats) {
    const fs::path dir(o.out_dir);
    json stats = stats_json(r.stats, !o.no_timing);
    stats["objective"] = r.has_solution() ? json(r.objective) : json(nullptr);
    for (auto& [k, v] : extra_stats.items()) stats[k] = v;
    write_file(dir / "stats.json", stats.dump(2) + "\n");
    if (r.has_solution()) {
        json sol = assignment_json(inst, extract_assignment(prob, *r.solution));
        sol["objective"] = r.objective;
        sol["status"] = milp_status_name(r.stats.status);
        write_file(dir / "solution.json", sol.dump(2) + "\n");
    }
}

int cmd_solve(const Options& o) {
    const auto inst = load_instance(o.instance);
    const auto prob = build_uc_milp(inst);
    const auto r = solve_milp(prob, milp_params(o));
    write_solution(o, inst, prob, r, json::object());
    std::printf("%s objective=%s nodes=%ld iters=%ld\n", milp_status_name(r.stats.status),
                r.has_solution() ? std::to_string(r.objective).c_str() : "none", r.stats.nodes, r.stats.simplex_iters);
    report_status(r);
    return status_exit(r);
}

int cmd_restrict(const Options& o) {
    check_method_prereqs(o, {o.method});
    const auto inst = load_instance(o.instance);
    const auto history = history_for(o, {o.method});
    const auto prob = build_uc_milp(inst);
    auto cfg = method_config(o);
    if (o.method == "fix-at-optimum") {
        const auto base = solve_milp(prob, milp_params(o));
        if (!base.has_solution()) throw SemanticError("fix-at-optimum: the unrestricted problem has no solution");
        cfg.optimum = to_schedule(extract_assignment(prob, *base.solution));
    }
    auto gen = make_generator(o.method, cfg);
    const auto mask = gen->generate(inst, history);
    auto hook = [&gen](const FreezeMask& prev, const Feedback& fb) { return gen->revise(prev, fb); };
    const auto pr = restricted_pipeline(inst, prob, mask, milp_params(o), pipeline_options(o), hook);
    const auto red = reduction_metrics(prob, pr.mask);

    json extra = {{"method", o.method},
                  {"provenance", pr.fell_back ? std::string("fallback") : gen->provenance()},
                  {"proposed_mask_size", mask.size()},
                  {"mask_size", pr.mask.size()},
                  {"revisions", pr.revisions},
                  {"fell_back", pr.fell_back},
                  {"screen_accepted", pr.screen.accepted()},
                  {"validation_ok", pr.validation.ok()},
                  {"var_red_pct", red.variable_pct},
                  {"con_red_pct", red.constraint_pct}};
    write_solution(o, inst, prob, pr.solve, extra);
    write_file(fs::path(o.out_dir) / "mask.json", mask_to_json(pr.mask) + "\n");
    std::printf("%s objective=%s nodes=%ld mask=%zu provenance=%s\n", milp_status_name(pr.solve.stats.status),
                pr.solve.has_solution() ? std::to_string(pr.solve.objective).c_str() : "none", pr.solve.stats.nodes,
                pr.mask.size(), extra["provenance"].get<std::string>().c_str());
    report_status(pr.solve);
    return status_exit(pr.solve);
}

std::vector<MethodSpec> method_specs(const Options& o, const std::vector<std::string>& names) {
    const auto cfg = method_config(o);
    std::vector<MethodSpec> specs;
    for (const auto& n : names) specs.push_back({n, cfg, pipeline_options(o)});
    return specs;
}

void write_runs(const Options& o, const std::vector<RunRecord>& records) {
    std::ostringstream csv;
    write_runs_csv(csv, records, {!o.no_timing});
    write_file(fs::path(o.out_dir) / "runs.csv", csv.str());
}

void print_rows(const std::vector<MethodAggregate>& rows) {
    for (const auto& a : rows)
        std::printf("%-15s solved %d/%d  cost %.2f  nodes %.1f  node_red %.2f%%  cost_err %.4f%%\n", a.method.c_str(),
                    a.solved, a.runs, a.avg_cost, a.avg_nodes, a.node_red_pct, a.avg_cost_err_pct);
}

int cmd_compare(const Options& o) {
    const auto names = split_list(o.methods);
    check_method_prereqs(o, names);
    const auto inst = load_instance(o.instance);
    const auto history = history_for(o, names);
    const auto table = run_comparison(inst, fs::path(o.instance).stem().string(), method_specs(o, names),
                                      milp_params(o), history);
    write_runs(o, table.records);
    write_file(fs::path(o.out_dir) / "summary.json", summary_json(table.rows, {!o.no_timing}));
    print_rows(table.rows);
    return table.records.front().objective ? ok : infeasible;
}

int cmd_sweep(const Options& o) {
    const auto names = split_list(o.methods);
    check_method_prereqs(o, names);
    const auto sigmas = parse_doubles(o.sigmas);
    if (sigmas.empty()) throw SemanticError("--sigmas must list at least one value");
    const auto inst = load_instance(o.instance);
    const auto history = history_for(o, names);
    const auto sweep =
        noise_sweep(inst, sigmas, o.trials, o.seed, method_specs(o, names), milp_params(o), history, o.jobs);
    write_runs(o, sweep.records);
    write_file(fs::path(o.out_dir) / "summary.json", sweep_summary_json(sweep, {!o.no_timing}));
    for (const auto& g : sweep.groups) {
        std::printf("sigma %g\n", g.sigma);
        print_rows(g.rows);
    }
    return ok;
}

int cmd_longhorizon(const Options& o) {
    check_method_prereqs(o, {o.method});
    if (o.days < 1) throw SemanticError("--days must be at least 1");
    const auto inst = load_instance(o.instance);
    const HistoryBank history = o.history.empty() ? HistoryBank{} : load_history(o.history);
    std::vector<std::vector<std::vector<double>>> demands;
    for (int d = 0; d < o.days; ++d)
        demands.push_back(perturb_demand(inst, o.sigma, split_seed(o.seed, static_cast<std::uint64_t>(d))).demand);
    const MethodSpec spec{o.method, method_config(o), pipeline_options(o)};
    const auto res = long_horizon(inst, demands, spec, o.carry, milp_params(o), history);
    write_runs(o, res.records);

    json days = json::array();
    std::size_t violated = 0;
    for (std::size_t d = 0; d < res.reports.size(); ++d) {
        violated += !res.reports[d].ok();
        days.push_back({{"day", d + 1},
                        {"initial_status", res.initial_status[d]},
                        {"final_status", res.final_status[d]},
                        {"violations", res.reports[d].violations.size()}});
    }
    json summary = json::parse(summary_json(aggregate(res.records), {!o.no_timing}));
    summary["carry_state"] = o.carry;
    summary["days_with_violations"] = violated;
    summary["days"] = days;
    write_file(fs::path(o.out_dir) / "summary.json", summary.dump(2) + "\n");
    print_rows(aggregate(res.records));
    std::printf("days with violations: %zu of %zu\n", violated, res.reports.size());
    return violated == 0 ? ok : invalid;
}

int cmd_validate(const Options& o) {
    const auto inst = load_instance(o.instance);
    const auto issues = validate_instance(inst);
    for (const auto& v : issues) std::printf("instance: %s: %s\n", v.field.c_str(), v.detail.c_str());
    int code = issues.empty() ? ok : invalid;
    if (!o.solution.empty()) {
        std::ifstream f(o.solution);
        if (!f) throw ParseError("cannot open '" + o.solution + "'");
        json doc;
        try {
            doc = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ParseError(o.solution + ": " + e.what());
        }
        if (!doc.is_object()) throw SchemaError("solution: top level must be an object");
        UcAssignment a;
        try {
            a = assignment_from_json(inst, doc);
        } catch (const json::exception& e) {
            throw SchemaError(std::string("solution: ") + e.what());
        }
        const auto report = evaluate_solution(inst, a);
        std::printf("solution: %s\n", report.ok() ? "feasible" : report.summary().c_str());
        std::printf("objective: %.6f\n", uc_objective(inst, a));
        if (!report.ok()) code = invalid;
    }
    if (code == ok) std::printf("ok\n");
    return code;
}

int cmd_history(const Options& o) {
    if (o.output.empty()) throw SemanticError("history needs --output");
    const auto inst = load_instance(o.instance);
    const auto bank = generate_history(inst, o.days, o.sigma, o.seed, milp_params(o));
    write_file(o.output, serialize_history(bank));
    std::printf("wrote %zu days to %s\n", bank.size(), o.output.c_str());
    return ok;
}

void add_solver_flags(CLI::App* sub, Options& o) {
    sub->add_option("instance", o.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--gap", o.gap, "Relative optimality gap tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--time-limit", o.time_limit, "Branch-and-bound time limit in seconds (0 = none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--node-limit", o.node_limit, "Branch-and-bound node limit (0 = none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "Master seed for every random choice");
}

void add_output_flags(CLI::App* sub, Options& o) {
    sub->add_option("-o,--out", o.out_dir, "Output directory");
    sub->add_flag("--no-timing", o.no_timing, "Write 0 in every wall-clock field so outputs are byte-stable");
}

void add_method_flags(CLI::App* sub, Options& o) {
    sub->add_option("--history", o.history, "History bank JSON (needed by stability, knn, kmeans)")
        ->check(CLI::ExistingFile);
    sub->add_option("--H", o.H, "Reference days for stability and LLM prompts")->check(CLI::PositiveNumber);
    sub->add_option("--k-cap", o.k_cap, "Per-hour fixing cap (0 = ceil(0.1 |G|))")->check(CLI::NonNegativeNumber);
    sub->add_option("--k-neighbors", o.k_neighbors, "Neighbours for knn")->check(CLI::PositiveNumber);
    sub->add_option("--clusters", o.clusters, "Clusters for kmeans (0 = ceil(sqrt(days)))")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--ratio", o.ratio, "Fraction of commitment variables for random and fix-at-optimum")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--llm-config", o.llm_config, "LLM endpoint JSON {url, model, timeout_s, max_retries}")
        ->check(CLI::ExistingFile);
    sub->add_flag("--screen", o.screen, "Screen masks before solving");
    sub->add_flag("--validate", o.validate, "Re-check restricted solutions against the full constraint set");
    sub->add_option("--revisions", o.revisions, "Revise attempts before falling back to the empty mask")
        ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Unit commitment with commitment restriction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ucr 0.1.0");

    auto* solve = app.add_subcommand("solve", "Solve the full unit commitment MILP");
    add_solver_flags(solve, o);
    add_output_flags(solve, o);

    const std::string method_help = "Mask generator: none, stability, knn, kmeans, random, fix-at-optimum, llm";
    auto* restrict = app.add_subcommand("restrict", "Generate a freeze mask and solve the restricted MILP");
    add_solver_flags(restrict, o);
    add_output_flags(restrict, o);
    add_method_flags(restrict, o);
    restrict->add_option("--method", o.method, method_help)->check(CLI::IsMember(generator_names()));

    auto* compare = app.add_subcommand("compare", "Baseline versus restricted methods on one instance");
    add_solver_flags(compare, o);
    add_output_flags(compare, o);
    add_method_flags(compare, o);
    compare->add_option("--methods", o.methods, "Comma-separated generator names");

    auto* sweep = app.add_subcommand("sweep", "Demand-noise sweep over several methods");
    add_solver_flags(sweep, o);
    add_output_flags(sweep, o);
    add_method_flags(sweep, o);
    sweep->add_option("--methods", o.methods, "Comma-separated generator names");
    sweep->add_option("--sigmas", o.sigmas, "Comma-separated relative noise levels");
    sweep->add_option("--trials", o.trials, "Trials per noise level")->check(CLI::PositiveNumber);
    sweep->add_option("--jobs", o.jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);

    auto* longh = app.add_subcommand("longhorizon", "Consecutive days with an optional carried unit state");
    add_solver_flags(longh, o);
    add_output_flags(longh, o);
    add_method_flags(longh, o);
    longh->add_option("--method", o.method, method_help)->check(CLI::IsMember(generator_names()));
    longh->add_option("--days", o.days, "Number of days")->check(CLI::PositiveNumber);
    longh->add_option("--sigma", o.sigma, "Relative demand noise per day")->check(CLI::NonNegativeNumber);
    longh->add_flag("--carry", o.carry, "Carry u0, p0 and initial durations from day to day");

    auto* validate = app.add_subcommand("validate", "Check an instance and optionally a solution file");
    validate->add_option("instance", o.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
    validate->add_option("--solution", o.solution, "Solution JSON written by solve or restrict")
        ->check(CLI::ExistingFile);

    auto* history = app.add_subcommand("history", "Solve perturbed days and write a history bank");
    add_solver_flags(history, o);
    history->add_option("--days", o.days, "Number of days")->check(CLI::NonNegativeNumber);
    history->add_option("--sigma", o.sigma, "Relative demand noise per day")->check(CLI::NonNegativeNumber);
    history->add_option("--output", o.output, "History JSON to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : parse_fail;
    }

    try {
        if (*solve) return cmd_solve(o);
        if (*restrict) return cmd_restrict(o);
        if (*compare) return cmd_compare(o);
        if (*sweep) return cmd_sweep(o);
        if (*longh) return cmd_longhorizon(o);
        if (*validate) return cmd_validate(o);
        if (*history) return cmd_history(o);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse_fail;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return parse_fail;
    } catch (const SemanticError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return invalid;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return invalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
    return internal;
}
