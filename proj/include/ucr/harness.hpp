#pragma once

#include "ucr/maskgen.hpp"
#include "ucr/restriction.hpp"
#include "ucr/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ucr {

/// 100·(restricted − baseline)/baseline. Throws SemanticError if baseline <= 0.
double relative_error(double restricted_cost, double baseline_cost);

/// 100·(1 − restricted/baseline). Throws SemanticError if baseline <= 0.
double time_reduction(double baseline_s, double restricted_s);

/// Fraction of (g, t) cells with equal commitment. Throws DimensionError.
double schedule_agreement(const DailySchedule& a, const DailySchedule& b);

struct RunRecord {
    std::string instance_id;
    std::string method;
    std::string provenance;
    MilpStatus status = MilpStatus::infeasible;
    std::optional<double> objective;
    SolveStats stats;
    double maskgen_time_s = 0.0;
    std::size_t mask_size = 0;
    ReductionMetrics reduction;
    bool screen_accepted = true;
    bool validation_ok = true;
    bool fell_back = false;
    std::optional<double> cost_err_pct;   // against the baseline of the same instance
    std::optional<DailySchedule> schedule;
    ConstraintReport check;               // evaluate_solution of the run's own solution
    std::string error;                    // set when the run threw
    double sigma = 0.0;                   // noise level for sweep trials
    int trial = 0;
};

struct MethodAggregate {
    std::string method;
    int runs = 0;
    int solved = 0;
    double avg_cost = 0.0;
    double avg_time = 0.0;
    double max_time = 0.0;
    double avg_nodes = 0.0;
    double avg_iters = 0.0;
    double var_red_pct = 0.0;
    double con_red_pct = 0.0;
    double node_red_pct = 0.0;
    double time_red_pct = 0.0;
    double avg_cost_err_pct = 0.0;
    double max_cost_err_pct = 0.0;
};

struct ComparisonTable {
    std::vector<MethodAggregate> rows;  // baseline first
    std::vector<RunRecord> records;
};

/// Method name "baseline" is reserved for the unrestricted solve.
inline constexpr const char* kBaselineMethod = "baseline";

/// Per-method means over `records`; reductions are taken against the
/// "baseline" rows, whose own reductions are 0. Records keep their order of
/// first appearance.
std::vector<MethodAggregate> aggregate(const std::vector<RunRecord>& records);

struct MethodSpec {
    std::string name;
    MethodConfig config;
    PipelineOptions options;
};

/// Solves the unrestricted baseline, then each method through
/// restricted_pipeline on the same instance and parameters. A method that
/// throws is recorded with its error and does not stop the table.
/// "fix-at-optimum" takes its schedule from the baseline when none is given.
ComparisonTable run_comparison(const UcInstance& inst, const std::string& instance_id,
                               const std::vector<MethodSpec>& methods, const MilpParams& params,
                               const HistoryBank& history);

struct SweepGroup {
    double sigma = 0.0;
    std::vector<MethodAggregate> rows;
};

struct SweepResult {
    std::vector<SweepGroup> groups;   // one per sigma, in input order
    std::vector<RunRecord> records;   // ordered by (sigma, trial, method)
};

/// Per sigma, `trials` perturbed copies of `inst` each run through
/// run_comparison. Trial (i, k) uses seed split_seed(seed, i·trials + k).
/// `jobs` > 1 runs trials on worker threads; output does not depend on it.
SweepResult noise_sweep(const UcInstance& inst, const std::vector<double>& sigmas, int trials, std::uint64_t seed,
                        const std::vector<MethodSpec>& methods, const MilpParams& params,
                        const HistoryBank& history, int jobs = 1);

/// `daily_demands[k]` is the demand matrix [bus][t-1] of day k.
struct LongHorizonResult {
    std::vector<RunRecord> records;                // baseline then method, per day
    std::vector<std::vector<int>> initial_status;  // u0 per day and generator
    std::vector<std::vector<int>> final_status;    // u at hour T of the carried solution
    std::vector<ConstraintReport> reports;         // carried solution checked on its day
};

/// Solves the days in order with the unrestricted baseline and `method`.
/// With carry_state each day's u0, p0 and init_duration come from the
/// previous day's method solution (the baseline's if the method found none).
/// Every baseline schedule is appended to the history used by later days.
LongHorizonResult long_horizon(const UcInstance& inst, const std::vector<std::vector<std::vector<double>>>& daily_demands,
                               const MethodSpec& method, bool carry_state, const MilpParams& params,
                               HistoryBank history);

/// Initial conditions for the next day from a solved schedule: u0 and p0
/// from hour T, init_duration from the terminal run (capped at max(UT, DT)).
UcInstance carry_state(const UcInstance& today, const DailySchedule& solved);

/// `days` perturbed copies of `inst` solved to optimality, each stored as
/// (total-load profile, schedule). Day k uses split_seed(seed, k).
HistoryBank generate_history(const UcInstance& inst, int days, double sigma, std::uint64_t seed,
                             const MilpParams& params);

/// splitmix64 of (seed, stream): independent, reproducible sub-seeds.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Output

struct OutputOptions {
    bool timing = true;  // false writes 0 in every wall-clock column
};

inline constexpr const char* kRunsCsvHeader =
    "instance_id,method,status,objective,nodes,simplex_iters,solve_time_s,maskgen_time_s,var_red_pct,con_red_pct,"
    "cost_err_pct";

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records, const OutputOptions& opts = {});

/// Reads back what write_runs_csv wrote (the CSV columns only).
std::vector<RunRecord> read_runs_csv(std::istream& in);

std::string summary_json(const std::vector<MethodAggregate>& rows, const OutputOptions& opts = {});
std::string sweep_summary_json(const SweepResult& sweep, const OutputOptions& opts = {});

}  // namespace ucr
