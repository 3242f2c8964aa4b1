#include "ucr/error.hpp"
#include "ucr/harness.hpp"

#include <algorithm>
#include <map>

namespace ucr {

double relative_error(double restricted_cost, double baseline_cost) {
    if (!(baseline_cost > 0.0)) throw SemanticError("relative_error: baseline cost must be positive");
    return 100.0 * (restricted_cost - baseline_cost) / baseline_cost;
}

double time_reduction(double baseline_s, double restricted_s) {
    if (!(baseline_s > 0.0)) throw SemanticError("time_reduction: baseline time must be positive");
    return 100.0 * (1.0 - restricted_s / baseline_s);
}

double schedule_agreement(const DailySchedule& a, const DailySchedule& b) {
    if (a.u.size() != b.u.size()) throw DimensionError("schedule_agreement: generator counts differ");
    std::size_t cells = 0, same = 0;
    for (std::size_t g = 0; g < a.u.size(); ++g) {
        if (a.u[g].size() != b.u[g].size()) throw DimensionError("schedule_agreement: horizons differ");
        for (std::size_t t = 0; t < a.u[g].size(); ++t) {
            ++cells;
            same += a.u[g][t] == b.u[g][t];
        }
    }
    if (cells == 0) throw DimensionError("schedule_agreement: empty schedules");
    return static_cast<double>(same) / static_cast<double>(cells);
}

std::vector<MethodAggregate> aggregate(const std::vector<RunRecord>& records) {
    std::vector<MethodAggregate> rows;
    std::map<std::string, std::size_t> pos;
    std::vector<int> err_count;
    for (const auto& r : records) {
        auto [it, inserted] = pos.emplace(r.method, rows.size());
        if (inserted) {
            rows.push_back({});
            rows.back().method = r.method;
            rows.back().max_cost_err_pct = 0.0;
            err_count.push_back(0);
        }
        auto& a = rows[it->second];
        ++a.runs;
        if (!r.objective) continue;
        ++a.solved;
        a.avg_cost += *r.objective;
        a.avg_time += r.stats.wall_time;
        a.max_time = std::max(a.max_time, r.stats.wall_time);
        a.avg_nodes += static_cast<double>(r.stats.nodes);
        a.avg_iters += static_cast<double>(r.stats.simplex_iters);
        a.var_red_pct += r.reduction.variable_pct;
        a.con_red_pct += r.reduction.constraint_pct;
        if (r.cost_err_pct) {
            const auto k = it->second;
            a.max_cost_err_pct = err_count[k] == 0 ? *r.cost_err_pct : std::max(a.max_cost_err_pct, *r.cost_err_pct);
            ++err_count[k];
            a.avg_cost_err_pct += *r.cost_err_pct;
        }
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        auto& a = rows[k];
        if (a.solved > 0) {
            const double n = a.solved;
            a.avg_cost /= n;
            a.avg_time /= n;
            a.avg_nodes /= n;
            a.avg_iters /= n;
            a.var_red_pct /= n;
            a.con_red_pct /= n;
        }
        if (err_count[k] > 0) a.avg_cost_err_pct /= err_count[k];
    }
    const auto base = pos.find(kBaselineMethod);
    if (base != pos.end()) {
        const auto& b = rows[base->second];
        for (auto& a : rows) {
            if (a.method == kBaselineMethod) continue;
            if (b.avg_nodes > 0.0 && a.solved > 0) a.node_red_pct = 100.0 * (1.0 - a.avg_nodes / b.avg_nodes);
            if (b.avg_time > 0.0 && a.solved > 0) a.time_red_pct = time_reduction(b.avg_time, a.avg_time);
        }
    }
    return rows;
}

}  // namespace ucr
