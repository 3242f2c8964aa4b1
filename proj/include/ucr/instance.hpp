#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ucr {

/// Thermal unit data. Costs in $, powers in MW, times in hours.
struct Generator {
    std::string id;
    std::string bus;
    double c = 0.0;     // $/MWh
    double c_nl = 0.0;  // $ per committed hour
    double c_su = 0.0;  // $ per startup
    double p_min = 0.0;
    double p_max = 0.0;
    int ut = 1;
    int dt = 1;
    double r_hr = 0.0;
    double r_su = 0.0;
    double r_sd = 0.0;
    int u0 = 0;
    double p0 = 0.0;
    int init_duration = 1;  // hours already spent in status u0

    bool operator==(const Generator&) const = default;
};

/// Transmission line. `b` is per-unit susceptance on kBaseMva.
struct Line {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double b = 0.0;
    double f_max = 0.0;  // MW

    bool operator==(const Line&) const = default;
};

/// System base used to convert per-unit susceptance to MW/rad.
inline constexpr double kBaseMva = 100.0;

/// One day-ahead network-constrained UC problem. Hours are 1..horizon in every
/// external interface; the demand matrix is stored 0-based as demand[bus][t-1].
struct UcInstance {
    std::vector<std::string> buses;
    std::string ref_bus;
    std::vector<Generator> generators;
    std::vector<Line> lines;
    int horizon = 0;
    std::vector<std::vector<double>> demand;

    std::optional<std::size_t> bus_index(std::string_view id) const;
    std::optional<std::size_t> generator_index(std::string_view id) const;

    /// Σ_n d[n][t-1]
    double total_demand(int t) const;
    std::vector<double> total_demand_profile() const;

    bool operator==(const UcInstance&) const = default;
};

/// Commitment and dispatch over (generator, hour), both indexed [g][t-1].
struct DailySchedule {
    std::vector<std::vector<int>> u;
    std::vector<std::vector<double>> p;

    /// Throws DimensionError / SemanticError when the shape or the
    /// u-binary / p-nonnegative / p=0-when-off invariants fail.
    void check(std::size_t num_generators, int horizon) const;

    bool operator==(const DailySchedule&) const = default;
};

struct HistoryDay {
    std::vector<double> demand;  // total system MW per hour
    DailySchedule schedule;
};

struct HistoryBank {
    std::vector<HistoryDay> days;

    bool empty() const { return days.empty(); }
    std::size_t size() const { return days.size(); }

    /// Throws DimensionError if any day does not match (|G|, T).
    void check_shape(std::size_t num_generators, int horizon) const;
};

struct InstanceViolation {
    std::string field;   // e.g. "generators[2].p_min", or "capacity"
    std::string detail;
};

/// Parses the JSON instance document. Throws ParseError on malformed JSON,
/// SchemaError on wrong/unknown/missing fields and SemanticError when a type
/// invariant fails; messages name the offending field.
UcInstance parse_instance(std::string_view text);
UcInstance load_instance(const std::string& path);
std::string serialize_instance(const UcInstance& inst);

/// Every type invariant plus the necessary capacity condition
/// Σ_g p_max >= max_t Σ_n d[n][t]. Empty iff the instance is usable.
std::vector<InstanceViolation> validate_instance(const UcInstance& inst);

/// Multiplicative per-bus, per-hour Gaussian noise truncated at zero.
UcInstance perturb_demand(const UcInstance& inst, double sigma_rel, std::uint64_t seed);

/// Euclidean distance between two equal-length load profiles.
double load_distance(std::span<const double> a, std::span<const double> b);

HistoryBank parse_history(std::string_view text);
HistoryBank load_history(const std::string& path);
std::string serialize_history(const HistoryBank& bank);

}  // namespace ucr
