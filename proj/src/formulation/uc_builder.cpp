#include "ucr/error.hpp"
#include "ucr/formulation.hpp"
#include "ucr/freeze_mask.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ucr {

const char* var_kind_name(VarKind kind) noexcept {
    switch (kind) {
        case VarKind::U: return "u";
        case VarKind::V: return "v";
        case VarKind::W: return "w";
        case VarKind::P: return "p";
        case VarKind::F: return "f";
        case VarKind::THETA: return "theta";
    }
    return "?";
}

const char* row_family_name(RowFamily f) noexcept {
    switch (f) {
        case RowFamily::capacity_min: return "capacity_min";
        case RowFamily::capacity_max: return "capacity_max";
        case RowFamily::logic: return "logic";
        case RowFamily::min_up: return "min_up";
        case RowFamily::min_down: return "min_down";
        case RowFamily::init_up: return "init_up";
        case RowFamily::init_down: return "init_down";
        case RowFamily::ramp_up: return "ramp_up";
        case RowFamily::ramp_down: return "ramp_down";
        case RowFamily::balance: return "balance";
        case RowFamily::flow: return "flow";
    }
    return "?";
}

int MilpProblem::add_column(Column col) {
    const int j = static_cast<int>(columns.size());
    if (!index_.emplace(col.key, j).second) throw std::logic_error("duplicate column key");
    columns.push_back(col);
    return j;
}

std::optional<int> MilpProblem::find(const VarKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int MilpProblem::index(const VarKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) throw std::out_of_range("no column for key");
    return it->second;
}

std::string MilpProblem::column_name(int j) const {
    const auto& k = columns[static_cast<std::size_t>(j)].key;
    const std::vector<std::string>* names = &generator_ids;
    if (k.kind == VarKind::F) names = &line_ids;
    if (k.kind == VarKind::THETA) names = &bus_ids;
    return std::string(var_kind_name(k.kind)) + "_" + (*names)[static_cast<std::size_t>(k.entity)] + "_" +
           std::to_string(k.t);
}

namespace {

class RowBuilder {
public:
    explicit RowBuilder(MilpProblem& prob) : prob_(prob) {}

    RowBuilder& start(RowFamily family, int entity, int t) {
        row_ = Row{};
        row_.family = family;
        row_.entity = entity;
        row_.t = t;
        return *this;
    }
    RowBuilder& add(VarKind kind, int entity, int t, double coef) {
        if (coef == 0.0) return *this;
        const int j = prob_.index({kind, entity, t});
        const auto it = std::find(row_.index.begin(), row_.index.end(), j);
        if (it != row_.index.end()) {
            row_.value[static_cast<std::size_t>(it - row_.index.begin())] += coef;
        } else {
            row_.index.push_back(j);
            row_.value.push_back(coef);
        }
        return *this;
    }
    void finish(Sense sense, double rhs) {
        row_.sense = sense;
        row_.rhs = rhs;
        prob_.rows.push_back(std::move(row_));
    }

private:
    MilpProblem& prob_;
    Row row_;
};

}  // namespace

MilpProblem build_uc_milp(const UcInstance& inst) {
    MilpProblem prob;
    const int G = static_cast<int>(inst.generators.size());
    const int K = static_cast<int>(inst.lines.size());
    const int N = static_cast<int>(inst.buses.size());
    const int T = inst.horizon;
    prob.horizon = T;
    for (const auto& g : inst.generators) prob.generator_ids.push_back(g.id);
    for (const auto& l : inst.lines) prob.line_ids.push_back(l.id);
    prob.bus_ids = inst.buses;

    for (VarKind kind : {VarKind::U, VarKind::V, VarKind::W}) {
        for (int g = 0; g < G; ++g) {
            const auto& gen = inst.generators[static_cast<std::size_t>(g)];
            const double cost = kind == VarKind::U ? gen.c_nl : kind == VarKind::V ? gen.c_su : 0.0;
            for (int t = 1; t <= T; ++t) prob.add_column({{kind, g, t}, 0.0, 1.0, true, cost});
        }
    }
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        for (int t = 1; t <= T; ++t) prob.add_column({{VarKind::P, g, t}, 0.0, gen.p_max, false, gen.c});
    }
    // Thermal limits as bounds on the flow columns.
    for (int k = 0; k < K; ++k) {
        const double fmax = inst.lines[static_cast<std::size_t>(k)].f_max;
        for (int t = 1; t <= T; ++t) prob.add_column({{VarKind::F, k, t}, -fmax, fmax, false, 0.0});
    }
    // Angles get a finite modeling box; the reference bus is pinned to 0.
    const double theta_box = 2.0 * std::numbers::pi * N;
    const int ref = static_cast<int>(*inst.bus_index(inst.ref_bus));
    for (int n = 0; n < N; ++n) {
        for (int t = 1; t <= T; ++t) {
            const double box = n == ref ? 0.0 : theta_box;
            prob.add_column({{VarKind::THETA, n, t}, -box, box, false, 0.0});
        }
    }

    RowBuilder rb(prob);
    using enum VarKind;

    // Capacity.
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::capacity_min, g, t).add(P, g, t, 1.0).add(U, g, t, -gen.p_min).finish(Sense::ge, 0.0);
            rb.start(RowFamily::capacity_max, g, t).add(P, g, t, 1.0).add(U, g, t, -gen.p_max).finish(Sense::le, 0.0);
        }
    }
    // Logic; u_{g,0} is the constant u0.
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::logic, g, t).add(U, g, t, 1.0).add(V, g, t, -1.0).add(W, g, t, 1.0);
            if (t > 1) {
                rb.add(U, g, t - 1, -1.0).finish(Sense::eq, 0.0);
            } else {
                rb.finish(Sense::eq, static_cast<double>(gen.u0));
            }
        }
    }
    // Minimum up/down with the window clamped at hour 1.
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::min_up, g, t);
            for (int s = std::max(1, t - gen.ut + 1); s <= t; ++s) rb.add(V, g, s, 1.0);
            rb.add(U, g, t, -1.0).finish(Sense::le, 0.0);
        }
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::min_down, g, t);
            for (int s = std::max(1, t - gen.dt + 1); s <= t; ++s) rb.add(W, g, s, 1.0);
            rb.add(U, g, t, 1.0).finish(Sense::le, 1.0);
        }
    }
    // Initial-condition forcing for units that have not yet met UT/DT.
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        if (gen.u0 == 1) {
            const int hours = std::min(T, std::max(0, gen.ut - gen.init_duration));
            for (int t = 1; t <= hours; ++t) rb.start(RowFamily::init_up, g, t).add(U, g, t, 1.0).finish(Sense::ge, 1.0);
        } else {
            const int hours = std::min(T, std::max(0, gen.dt - gen.init_duration));
            for (int t = 1; t <= hours; ++t) rb.start(RowFamily::init_down, g, t).add(U, g, t, 1.0).finish(Sense::le, 0.0);
        }
    }
    // Ramping; (u_{g,0}, P_{g,0}) move to the right-hand side at t = 1.
    for (int g = 0; g < G; ++g) {
        const auto& gen = inst.generators[static_cast<std::size_t>(g)];
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::ramp_up, g, t).add(P, g, t, 1.0).add(V, g, t, -gen.r_su);
            if (t > 1) {
                rb.add(P, g, t - 1, -1.0).add(U, g, t - 1, -gen.r_hr).finish(Sense::le, 0.0);
            } else {
                rb.finish(Sense::le, gen.p0 + gen.r_hr * gen.u0);
            }
        }
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::ramp_down, g, t).add(P, g, t, -1.0).add(U, g, t, -gen.r_hr).add(W, g, t, -gen.r_sd);
            if (t > 1) {
                rb.add(P, g, t - 1, 1.0).finish(Sense::le, 0.0);
            } else {
                rb.finish(Sense::le, -gen.p0);
            }
        }
    }
    // Nodal balance with a_{n,k} = +1 at from_bus, -1 at to_bus.
    for (int n = 0; n < N; ++n) {
        for (int t = 1; t <= T; ++t) {
            rb.start(RowFamily::balance, n, t);
            for (int g = 0; g < G; ++g)
                if (inst.generators[static_cast<std::size_t>(g)].bus == inst.buses[static_cast<std::size_t>(n)])
                    rb.add(P, g, t, 1.0);
            for (int k = 0; k < K; ++k) {
                const auto& line = inst.lines[static_cast<std::size_t>(k)];
                if (line.from_bus == inst.buses[static_cast<std::size_t>(n)]) rb.add(F, k, t, -1.0);
                if (line.to_bus == inst.buses[static_cast<std::size_t>(n)]) rb.add(F, k, t, 1.0);
            }
            rb.finish(Sense::eq, inst.demand[static_cast<std::size_t>(n)][static_cast<std::size_t>(t - 1)]);
        }
    }
    // DC flow, susceptance scaled to MW/rad on kBaseMva.
    for (int k = 0; k < K; ++k) {
        const auto& line = inst.lines[static_cast<std::size_t>(k)];
        const int i = static_cast<int>(*inst.bus_index(line.from_bus));
        const int j = static_cast<int>(*inst.bus_index(line.to_bus));
        const double bk = kBaseMva * line.b;
        for (int t = 1; t <= T; ++t)
            rb.start(RowFamily::flow, k, t).add(F, k, t, 1.0).add(THETA, i, t, -bk).add(THETA, j, t, bk).finish(Sense::eq, 0.0);
    }
    return prob;
}

MilpProblem fix_commitments(const MilpProblem& prob, const FreezeMask& mask) {
    MilpProblem out = prob;
    for (const auto& e : mask.entries()) {
        const auto it = std::find(prob.generator_ids.begin(), prob.generator_ids.end(), e.g);
        const std::string tuple = "(" + std::to_string(e.t) + ", " + e.g + ", " + std::to_string(e.u) + ")";
        if (it == prob.generator_ids.end()) throw SemanticError("fix_commitments: unknown generator in " + tuple);
        if (e.t < 1 || e.t > prob.horizon) throw SemanticError("fix_commitments: hour out of range in " + tuple);
        const int g = static_cast<int>(it - prob.generator_ids.begin());
        auto& col = out.columns[static_cast<std::size_t>(prob.index({VarKind::U, g, e.t}))];
        col.lower = col.upper = static_cast<double>(e.u);
    }
    return out;
}

MilpProblem unfix_all(const MilpProblem& prob) {
    MilpProblem out = prob;
    for (auto& col : out.columns) {
        if (col.key.kind == VarKind::U) {
            col.lower = 0.0;
            col.upper = 1.0;
        }
    }
    return out;
}

ProblemCounts problem_counts(const MilpProblem& prob) {
    ProblemCounts c;
    for (const auto& col : prob.columns) (col.integer ? c.binary : c.continuous)++;
    c.rows = prob.rows.size();
    return c;
}

}  // namespace ucr
