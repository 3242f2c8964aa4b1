#pragma once

#include "ucr/formulation.hpp"
#include "ucr/freeze_mask.hpp"
#include "ucr/solver.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ucr {

struct ScreenReason {
    std::string check;  // "capacity", "logic" or "ramp"
    int t = 0;
    std::string g;      // empty for system-wide checks
    std::string detail;
};

struct ScreenReport {
    std::vector<ScreenReason> reasons;

    bool accepted() const { return reasons.empty(); }
    std::string summary(std::size_t max_items = 10) const;
};

/// Necessary-condition checks on a mask before solving. Never rejects a mask
/// that agrees with some feasible commitment schedule.
///
///  capacity  Σ p_max over units not frozen off at t covers total demand.
///  logic     frozen values respect min up/down given the other frozen values
///            and the initial status, including the initial forcing window.
///  ramp      at hours next to a frozen cell, the change in total demand is
///            within the aggregate up/down ramp capability of the fleet.
ScreenReport screen_mask(const UcInstance& inst, const FreezeMask& mask);

struct ReductionMetrics {
    double variable_pct = 0.0;
    double constraint_pct = 0.0;
};

/// A mask fixes its U columns; V and W at hour t are implied fixed once U at
/// t and t-1 are (u0 stands in for hour 0). Variable reduction is the share of
/// binary columns newly fixed. Constraint reduction is the share of rows whose
/// columns are all fixed, at least one of them by the mask.
ReductionMetrics reduction_metrics(const MilpProblem& prob, const FreezeMask& mask);

/// What a mask generator gets back when a mask is rejected.
struct Feedback {
    std::string summary;
    std::vector<std::pair<int, std::string>> cells;  // implicated (t, g)
};

/// Cells named by the failing screening checks.
Feedback screen_feedback(const FreezeMask& mask, const ScreenReport& report);

using ReviseHook = std::function<FreezeMask(const FreezeMask& previous, const Feedback& feedback)>;

struct PipelineOptions {
    bool screen = false;
    bool validate = false;
    int max_retries = 1;
};

struct PipelineResult {
    MilpResult solve;
    FreezeMask mask;            // mask actually imposed on the final solve
    ScreenReport screen;        // report for the final mask (empty if not screened)
    ConstraintReport validation;
    bool fell_back = false;     // the empty mask replaced the proposal
    int revisions = 0;          // revise-hook calls made
};

/// Screen, fix, solve and validate, revising through `revise` on failure.
/// When retries run out the unrestricted problem is solved instead. With
/// every option off this is warm_restricted_solve.
PipelineResult restricted_pipeline(const UcInstance& inst, const MilpProblem& prob, const FreezeMask& mask,
                                   const MilpParams& params, const PipelineOptions& options,
                                   const ReviseHook& revise = {});

}  // namespace ucr
