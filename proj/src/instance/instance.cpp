#include "ucr/instance.hpp"

#include "ucr/error.hpp"
#include "ucr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>

namespace ucr {

std::optional<std::size_t> UcInstance::bus_index(std::string_view id) const {
    const auto it = std::find(buses.begin(), buses.end(), id);
    if (it == buses.end()) return std::nullopt;
    return static_cast<std::size_t>(it - buses.begin());
}

std::optional<std::size_t> UcInstance::generator_index(std::string_view id) const {
    const auto it = std::find_if(generators.begin(), generators.end(),
                                 [&](const Generator& g) { return g.id == id; });
    if (it == generators.end()) return std::nullopt;
    return static_cast<std::size_t>(it - generators.begin());
}

double UcInstance::total_demand(int t) const {
    double s = 0.0;
    for (const auto& row : demand) s += row[static_cast<std::size_t>(t - 1)];
    return s;
}

std::vector<double> UcInstance::total_demand_profile() const {
    std::vector<double> out(static_cast<std::size_t>(std::max(horizon, 0)), 0.0);
    for (int t = 1; t <= horizon; ++t) out[static_cast<std::size_t>(t - 1)] = total_demand(t);
    return out;
}

void DailySchedule::check(std::size_t num_generators, int horizon) const {
    const auto T = static_cast<std::size_t>(horizon);
    if (u.size() != num_generators || p.size() != num_generators)
        throw DimensionError("schedule: expected " + std::to_string(num_generators) + " generator rows");
    for (std::size_t g = 0; g < num_generators; ++g) {
        if (u[g].size() != T || p[g].size() != T)
            throw DimensionError("schedule: row " + std::to_string(g) + " does not have " +
                                 std::to_string(T) + " hours");
        for (std::size_t t = 0; t < T; ++t) {
            if (u[g][t] != 0 && u[g][t] != 1)
                throw SemanticError("schedule: u[" + std::to_string(g) + "][" + std::to_string(t) +
                                    "] is not binary");
            if (!(p[g][t] >= 0.0) || !std::isfinite(p[g][t]))
                throw SemanticError("schedule: p[" + std::to_string(g) + "][" + std::to_string(t) +
                                    "] is negative or not finite");
            if (u[g][t] == 0 && p[g][t] != 0.0)
                throw SemanticError("schedule: p[" + std::to_string(g) + "][" + std::to_string(t) +
                                    "] is nonzero while the unit is off");
        }
    }
}

void HistoryBank::check_shape(std::size_t num_generators, int horizon) const {
    for (std::size_t d = 0; d < days.size(); ++d) {
        if (days[d].demand.size() != static_cast<std::size_t>(horizon))
            throw DimensionError("history day " + std::to_string(d) + ": demand length " +
                                 std::to_string(days[d].demand.size()) + " != horizon " +
                                 std::to_string(horizon));
        try {
            days[d].schedule.check(num_generators, horizon);
        } catch (const Error& e) {
            throw DimensionError("history day " + std::to_string(d) + ": " + e.what());
        }
    }
}

namespace {

std::string gen_field(std::size_t i, const char* name) {
    return "generators[" + std::to_string(i) + "]." + name;
}

bool connected(const UcInstance& inst) {
    const std::size_t n = inst.buses.size();
    if (n <= 1) return true;
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& l : inst.lines) {
        const auto a = inst.bus_index(l.from_bus);
        const auto b = inst.bus_index(l.to_bus);
        if (!a || !b) continue;
        adj[*a].push_back(*b);
        adj[*b].push_back(*a);
    }
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        const auto v = q.front();
        q.pop();
        for (auto w : adj[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
        }
    }
    return count == n;
}

}  // namespace

std::vector<InstanceViolation> validate_instance(const UcInstance& inst) {
    std::vector<InstanceViolation> out;
    auto add = [&](std::string field, std::string detail) {
        out.push_back({std::move(field), std::move(detail)});
    };

    if (inst.buses.empty()) add("buses", "at least one bus is required");
    {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < inst.buses.size(); ++i)
            if (!seen.insert(inst.buses[i]).second)
                add("buses[" + std::to_string(i) + "]", "duplicate bus id '" + inst.buses[i] + "'");
    }
    if (!inst.bus_index(inst.ref_bus)) add("ref_bus", "unknown bus '" + inst.ref_bus + "'");
    if (inst.horizon < 1) add("horizon", "must be an integer >= 1");

    std::set<std::string> gen_ids;
    for (std::size_t i = 0; i < inst.generators.size(); ++i) {
        const auto& g = inst.generators[i];
        if (!gen_ids.insert(g.id).second) add(gen_field(i, "id"), "duplicate generator id '" + g.id + "'");
        if (!inst.bus_index(g.bus)) add(gen_field(i, "bus"), "unknown bus '" + g.bus + "'");
        const double nums[] = {g.c, g.c_nl, g.c_su, g.p_min, g.p_max, g.r_hr, g.r_su, g.r_sd, g.p0};
        if (!std::all_of(std::begin(nums), std::end(nums), [](double v) { return std::isfinite(v); }))
            add("generators[" + std::to_string(i) + "]", "non-finite numeric field");
        if (g.p_min < 0.0) add(gen_field(i, "p_min"), "must be >= 0");
        if (g.p_min > g.p_max) add(gen_field(i, "p_min"), "p_min exceeds p_max on unit '" + g.id + "'");
        if (g.ut < 1) add(gen_field(i, "ut"), "must be >= 1");
        if (g.dt < 1) add(gen_field(i, "dt"), "must be >= 1");
        if (g.init_duration < 1) add(gen_field(i, "init_duration"), "must be >= 1");
        if (g.u0 != 0 && g.u0 != 1) add(gen_field(i, "u0"), "must be 0 or 1");
        if (g.u0 == 1 && (g.p0 < g.p_min || g.p0 > g.p_max))
            add(gen_field(i, "p0"), "must lie in [p_min, p_max] when u0 = 1");
        if (g.u0 == 0 && g.p0 != 0.0) add(gen_field(i, "p0"), "must be 0 when u0 = 0");
        if (g.r_hr < 0.0) add(gen_field(i, "r_hr"), "must be >= 0");
        if (g.r_su < g.p_min) add(gen_field(i, "r_su"), "must be >= p_min");
        if (g.r_sd < g.p_min) add(gen_field(i, "r_sd"), "must be >= p_min");
    }

    std::set<std::string> line_ids;
    for (std::size_t k = 0; k < inst.lines.size(); ++k) {
        const auto& l = inst.lines[k];
        const std::string base = "lines[" + std::to_string(k) + "].";
        if (!line_ids.insert(l.id).second) add(base + "id", "duplicate line id '" + l.id + "'");
        if (!inst.bus_index(l.from_bus)) add(base + "from_bus", "unknown bus '" + l.from_bus + "'");
        if (!inst.bus_index(l.to_bus)) add(base + "to_bus", "unknown bus '" + l.to_bus + "'");
        if (l.from_bus == l.to_bus) add(base + "to_bus", "line '" + l.id + "' connects a bus to itself");
        if (!(l.b > 0.0) || !std::isfinite(l.b)) add(base + "b", "susceptance must be > 0");
        if (!(l.f_max > 0.0) || !std::isfinite(l.f_max)) add(base + "f_max", "thermal limit must be > 0");
    }

    bool demand_ok = inst.demand.size() == inst.buses.size();
    if (!demand_ok) {
        add("demand", "expected one row per bus");
    } else {
        for (std::size_t n = 0; n < inst.demand.size(); ++n) {
            const std::string field = "demand." + inst.buses[n];
            if (inst.horizon >= 1 && inst.demand[n].size() != static_cast<std::size_t>(inst.horizon)) {
                add(field, "expected " + std::to_string(inst.horizon) + " hourly values");
                demand_ok = false;
                continue;
            }
            for (std::size_t t = 0; t < inst.demand[n].size(); ++t) {
                const double d = inst.demand[n][t];
                if (!std::isfinite(d) || d < 0.0) {
                    add(field + "[" + std::to_string(t) + "]", "demand must be finite and >= 0");
                    demand_ok = false;
                }
            }
        }
    }

    if (!connected(inst)) add("lines", "network is not a single connected island");

    if (demand_ok && inst.horizon >= 1) {
        double cap = 0.0;
        for (const auto& g : inst.generators) cap += g.p_max;
        const auto profile = inst.total_demand_profile();
        const double peak = *std::max_element(profile.begin(), profile.end());
        if (cap < peak)
            add("capacity", "total p_max " + std::to_string(cap) + " MW is below peak demand " +
                                std::to_string(peak) + " MW");
    }
    return out;
}

UcInstance perturb_demand(const UcInstance& inst, double sigma_rel, std::uint64_t seed) {
    if (sigma_rel < 0.0) throw std::invalid_argument("perturb_demand: sigma_rel must be >= 0");
    UcInstance out = inst;
    if (sigma_rel == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& row : out.demand)
        for (auto& d : row) d *= std::max(0.0, 1.0 + sigma_rel * normal(rng));
    return out;
}

double load_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("load_distance: length " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    return std::sqrt(kernels::squared_distance(a, b));
}

}  // namespace ucr
