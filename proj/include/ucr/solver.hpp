#pragma once

#include "ucr/formulation.hpp"

#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ucr {

class FreezeMask;

enum class LpStatus { optimal, infeasible, unbounded, time_limit };

const char* lp_status_name(LpStatus s) noexcept;

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> values;  // structural columns only
    long iterations = 0;
};

/// Per-variable basis status over structural columns followed by row slacks.
struct Basis {
    enum : std::int8_t { basic = 0, at_lower = 1, at_upper = 2, free_zero = 3 };
    std::vector<std::int8_t> status;
};

enum class Pricing { dantzig, devex };

struct SimplexOptions {
    double primal_tol = 1e-7;
    double dual_tol = 1e-7;
    double pivot_tol = 1e-7;
    int refactor_interval = 64;
    long stall_threshold = 1000;  // pivots without merit progress before Bland's rule
    long max_iterations = 0;      // 0 selects a size-based default
    Pricing pricing = Pricing::devex;
};

/// Bounded-variable primal simplex on the LP relaxation of a MilpProblem.
///
/// Rows become a·x + s = rhs with one slack per row (s >= 0 for <=, s <= 0
/// for >=, s = 0 for =). Phase 1 minimises the sum of bound infeasibilities
/// of the basic variables, so any basis is a valid starting point; this is
/// what lets branch-and-bound children restart from their parent's basis.
/// Pricing is Devex (or plain Dantzig) with a Bland fallback after `stall_threshold`
/// pivots without progress. The basis is factorized with a sparse LU and updated in
/// product form between refactorizations.
class SimplexSolver {
public:
    explicit SimplexSolver(const MilpProblem& prob, SimplexOptions opts = {});
    ~SimplexSolver();
    SimplexSolver(SimplexSolver&&) noexcept;
    SimplexSolver& operator=(SimplexSolver&&) noexcept;

    std::size_t num_columns() const;
    std::size_t num_rows() const;

    void set_bounds(int column, double lower, double upper);
    /// Restores every structural bound to the problem's own.
    void reset_bounds();
    double lower(int column) const;
    double upper(int column) const;

    using Clock = std::chrono::steady_clock;

    /// Solves from `warm` (or the all-slack basis). Throws NumericalError if
    /// no progress is possible.
    LpResult solve(const Basis* warm = nullptr, std::optional<Clock::time_point> deadline = std::nullopt);

    /// Basis reached by the last solve.
    Basis basis() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// LP relaxation of `prob` (integrality dropped).
LpResult solve_lp(const MilpProblem& prob, SimplexOptions opts = {});

enum class MilpStatus { optimal, infeasible, gap_limit, time_limit, node_limit };

const char* milp_status_name(MilpStatus s) noexcept;

struct MilpParams {
    double gap_tol = 1e-4;  // relative
    std::optional<double> time_limit;  // seconds
    std::optional<long> node_limit;
    /// 0 keeps lowest-index tie breaking among equally fractional binaries;
    /// any other value breaks those ties by a seeded hash.
    std::uint64_t seed = 0;
};

struct SolveStats {
    long nodes = 0;
    long simplex_iters = 0;
    double wall_time = 0.0;  // seconds, branch-and-bound only
    double gap = std::numeric_limits<double>::infinity();
    MilpStatus status = MilpStatus::infeasible;
    double root_bound = std::numeric_limits<double>::quiet_NaN();
    double best_bound = std::numeric_limits<double>::quiet_NaN();
};

struct MilpResult {
    std::optional<std::vector<double>> solution;
    double objective = std::numeric_limits<double>::quiet_NaN();
    SolveStats stats;

    bool has_solution() const { return solution.has_value(); }
};

/// LP-based branch-and-bound: most-fractional branching (lowest index on
/// ties), depth-first until the first incumbent then best-bound, plus a root
/// rounding heuristic on U columns. Fully deterministic for fixed inputs.
///
/// Status `optimal` means the tree was exhausted; `gap_limit` means the search
/// stopped with open nodes because the relative gap reached gap_tol. Both
/// return a solution within gap_tol of the optimum.
MilpResult solve_milp(const MilpProblem& prob, const MilpParams& params = {});

/// solve_milp(fix_commitments(prob, mask), params).
MilpResult warm_restricted_solve(const MilpProblem& prob, const FreezeMask& mask, const MilpParams& params = {});

/// Fixes every binary column to `binaries` (values rounded) and solves the
/// remaining dispatch LP.
LpResult solve_fixed_binaries(const MilpProblem& prob, const std::vector<double>& binaries);

}  // namespace ucr
