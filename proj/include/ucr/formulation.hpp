#pragma once

#include "ucr/instance.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ucr {

class FreezeMask;

enum class VarKind : std::uint8_t { U, V, W, P, F, THETA };

const char* var_kind_name(VarKind kind) noexcept;

/// Identifies one column: `entity` indexes generators (U,V,W,P), lines (F) or
/// buses (THETA) of the source instance; `t` is the 1-based hour.
struct VarKey {
    VarKind kind = VarKind::U;
    int entity = 0;
    int t = 1;

    bool operator==(const VarKey&) const = default;
};

struct VarKeyHash {
    std::size_t operator()(const VarKey& k) const noexcept {
        return (static_cast<std::size_t>(k.kind) << 56) ^ (static_cast<std::size_t>(k.entity) << 24) ^
               static_cast<std::size_t>(k.t);
    }
};

enum class Sense : std::uint8_t { le, eq, ge };

enum class RowFamily : std::uint8_t {
    capacity_min,
    capacity_max,
    logic,
    min_up,
    min_down,
    init_up,
    init_down,
    ramp_up,
    ramp_down,
    balance,
    flow,
};

const char* row_family_name(RowFamily f) noexcept;

struct Column {
    VarKey key;
    double lower = 0.0;
    double upper = 0.0;
    bool integer = false;
    double cost = 0.0;
};

struct Row {
    std::vector<int> index;
    std::vector<double> value;
    Sense sense = Sense::le;
    double rhs = 0.0;
    RowFamily family = RowFamily::capacity_min;
    int entity = 0;  // generator, line or bus index
    int t = 1;
};

/// Sparse MILP: min c'x s.t. rows, bounds, integrality. Built once per
/// instance and treated as immutable; fix/unfix return modified copies.
class MilpProblem {
public:
    std::vector<Column> columns;
    std::vector<Row> rows;

    // Entity names of the source instance, for addressing by id.
    std::vector<std::string> generator_ids;
    std::vector<std::string> line_ids;
    std::vector<std::string> bus_ids;
    int horizon = 0;

    int add_column(Column col);
    std::optional<int> find(const VarKey& key) const;
    int index(const VarKey& key) const;  // throws std::out_of_range

    std::size_t num_columns() const { return columns.size(); }
    std::size_t num_rows() const { return rows.size(); }

    std::string column_name(int j) const;

private:
    std::unordered_map<VarKey, int, VarKeyHash> index_;
};

/// Network-constrained UC MILP for `inst`. Column order: U, V, W, P (generator-major), then
/// F (line-major), then THETA (bus-major). Requires a valid instance.
MilpProblem build_uc_milp(const UcInstance& inst);

/// Copy of `prob` with U(g,t) bounds pinned to the mask values.
/// Throws SemanticError for unknown generator ids or hours outside [1,T].
MilpProblem fix_commitments(const MilpProblem& prob, const FreezeMask& mask);

/// Copy of `prob` with every U column back on [0,1].
MilpProblem unfix_all(const MilpProblem& prob);

struct ProblemCounts {
    std::size_t binary = 0;
    std::size_t continuous = 0;
    std::size_t rows = 0;

    bool operator==(const ProblemCounts&) const = default;
};

ProblemCounts problem_counts(const MilpProblem& prob);

/// Writes the problem in CPLEX LP text format.
void write_lp(const MilpProblem& prob, std::ostream& out);

/// Column values regrouped by variable family, each indexed [entity][t-1].
struct UcAssignment {
    std::vector<std::vector<double>> u, v, w, p, f, theta;
};

UcAssignment extract_assignment(const MilpProblem& prob, const std::vector<double>& values);
DailySchedule to_schedule(const UcAssignment& a);

inline constexpr double kFeasibilityTol = 1e-6;

struct ConstraintViolation {
    std::string family;  // "capacity", "logic", "line limit", ...
    std::string entity;  // generator, line or bus id
    int t = 0;
    double residual = 0.0;
};

struct ConstraintReport {
    std::vector<ConstraintViolation> violations;

    bool ok() const { return violations.empty(); }
    double max_residual() const;
    std::string summary(std::size_t max_items = 10) const;
};

/// Checks capacity, logic, min up/down, ramping, balance, flow and line limits, the horizon-boundary min up/down rules, the reference
/// angle and binary integrality directly from instance data.
ConstraintReport evaluate_solution(const UcInstance& inst, const UcAssignment& a,
                                   double tol = kFeasibilityTol);

/// Total cost evaluated from an assignment.
double uc_objective(const UcInstance& inst, const UcAssignment& a);

}  // namespace ucr
