#include "ucr/error.hpp"
#include "ucr/harness.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace ucr {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("runs csv line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

MilpStatus parse_status(const std::string& s, std::size_t line) {
    for (auto st : {MilpStatus::optimal, MilpStatus::infeasible, MilpStatus::gap_limit, MilpStatus::time_limit,
                    MilpStatus::node_limit})
        if (s == milp_status_name(st)) return st;
    throw ParseError("runs csv line " + std::to_string(line) + ": unknown status '" + s + "'");
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, const OutputOptions& opts) {
    out << kRunsCsvHeader << '\n';
    for (const auto& r : records) {
        for (const auto& s : {r.instance_id, r.method})
            if (s.find_first_of(",\n") != std::string::npos)
                throw SemanticError("runs csv: field '" + s + "' contains a comma or newline");
        const double solve_t = opts.timing ? r.stats.wall_time : 0.0;
        const double gen_t = opts.timing ? r.maskgen_time_s : 0.0;
        out << r.instance_id << ',' << r.method << ',' << milp_status_name(r.status) << ',' << opt(r.objective) << ','
            << r.stats.nodes << ',' << r.stats.simplex_iters << ',' << num(solve_t) << ',' << num(gen_t) << ','
            << num(r.reduction.variable_pct) << ',' << num(r.reduction.constraint_pct) << ',' << opt(r.cost_err_pct)
            << '\n';
    }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRunsCsvHeader) throw ParseError("runs csv: missing or unexpected header");
    std::vector<RunRecord> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 11) throw ParseError("runs csv line " + std::to_string(n) + ": expected 11 fields");
        RunRecord r;
        r.instance_id = c[0];
        r.method = c[1];
        r.status = parse_status(c[2], n);
        r.stats.status = r.status;
        if (!c[3].empty()) r.objective = to_double(c[3], n);
        r.stats.nodes = static_cast<long>(to_double(c[4], n));
        r.stats.simplex_iters = static_cast<long>(to_double(c[5], n));
        r.stats.wall_time = to_double(c[6], n);
        r.maskgen_time_s = to_double(c[7], n);
        r.reduction.variable_pct = to_double(c[8], n);
        r.reduction.constraint_pct = to_double(c[9], n);
        if (!c[10].empty()) r.cost_err_pct = to_double(c[10], n);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

json rows_json(const std::vector<MethodAggregate>& rows, const OutputOptions& opts) {
    json arr = json::array();
    for (const auto& a : rows) {
        arr.push_back({{"method", a.method},
                       {"runs", a.runs},
                       {"solved", a.solved},
                       {"avg_cost", a.avg_cost},
                       {"avg_time_s", opts.timing ? a.avg_time : 0.0},
                       {"max_time_s", opts.timing ? a.max_time : 0.0},
                       {"avg_nodes", a.avg_nodes},
                       {"avg_simplex_iters", a.avg_iters},
                       {"var_red_pct", a.var_red_pct},
                       {"con_red_pct", a.con_red_pct},
                       {"node_red_pct", a.node_red_pct},
                       {"time_red_pct", opts.timing ? a.time_red_pct : 0.0},
                       {"avg_cost_err_pct", a.avg_cost_err_pct},
                       {"max_cost_err_pct", a.max_cost_err_pct}});
    }
    return arr;
}

}  // namespace

std::string summary_json(const std::vector<MethodAggregate>& rows, const OutputOptions& opts) {
    return json{{"methods", rows_json(rows, opts)}}.dump(2) + "\n";
}

std::string sweep_summary_json(const SweepResult& sweep, const OutputOptions& opts) {
    json groups = json::array();
    for (const auto& g : sweep.groups) groups.push_back({{"sigma", g.sigma}, {"methods", rows_json(g.rows, opts)}});
    return json{{"groups", groups}}.dump(2) + "\n";
}

}  // namespace ucr
