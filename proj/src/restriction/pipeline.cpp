#include "ucr/restriction.hpp"

#include <set>

namespace ucr {

namespace {

// Economic dispatch with the commitments of `values` held fixed, checked
// against every constraint of the original instance.
ConstraintReport validate(const UcInstance& inst, const MilpProblem& prob, const std::vector<double>& values) {
    const LpResult ed = solve_fixed_binaries(prob, values);
    if (ed.status != LpStatus::optimal) {
        ConstraintReport rep;
        rep.violations.push_back({"dispatch", "", 0, 1.0});
        return rep;
    }
    return evaluate_solution(inst, extract_assignment(prob, ed.values));
}

Feedback validation_feedback(const FreezeMask& mask, const ConstraintReport& rep) {
    Feedback fb;
    fb.summary = rep.summary();
    std::set<std::pair<int, std::string>> cells;
    for (const auto& v : rep.violations)
        for (const auto& e : mask.entries())
            if (e.g == v.entity && (e.t == v.t || e.t + 1 == v.t)) cells.insert({e.t, e.g});
    if (cells.empty())
        for (const auto& e : mask.entries()) cells.insert({e.t, e.g});
    fb.cells.assign(cells.begin(), cells.end());
    return fb;
}

Feedback infeasible_feedback(const FreezeMask& mask, const MilpResult& r) {
    Feedback fb;
    fb.summary = std::string("restricted problem returned no solution (status ") + milp_status_name(r.stats.status) +
                 "); binding fixings unknown";
    for (const auto& e : mask.entries()) fb.cells.push_back({e.t, e.g});
    return fb;
}

}  // namespace

PipelineResult restricted_pipeline(const UcInstance& inst, const MilpProblem& prob, const FreezeMask& mask,
                                   const MilpParams& params, const PipelineOptions& options, const ReviseHook& revise) {
    PipelineResult out;
    FreezeMask current = mask;
    const bool can_revise = static_cast<bool>(revise);

    auto retry = [&](const Feedback& fb) {
        if (!can_revise || out.revisions >= options.max_retries) return false;
        ++out.revisions;
        current = revise(current, fb);
        return true;
    };

    while (true) {
        if (options.screen) {
            out.screen = screen_mask(inst, current);
            if (!out.screen.accepted()) {
                if (retry(screen_feedback(current, out.screen))) continue;
                break;
            }
        }
        out.solve = warm_restricted_solve(prob, current, params);
        out.mask = current;
        if (!options.validate) return out;
        if (!out.solve.has_solution()) {
            if (!current.empty() && retry(infeasible_feedback(current, out.solve))) continue;
            if (current.empty()) return out;
            break;
        }
        out.validation = validate(inst, prob, *out.solve.solution);
        if (out.validation.ok()) return out;
        if (retry(validation_feedback(current, out.validation))) continue;
        break;
    }

    out.fell_back = true;
    out.mask = FreezeMask({}, mask.k_cap());
    out.screen = {};
    out.solve = solve_milp(prob, params);
    out.validation = {};
    if (options.validate && out.solve.has_solution()) out.validation = validate(inst, prob, *out.solve.solution);
    return out;
}

}  // namespace ucr
