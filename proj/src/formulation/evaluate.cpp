#include "ucr/formulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace ucr {

UcAssignment extract_assignment(const MilpProblem& prob, const std::vector<double>& values) {
    const auto G = prob.generator_ids.size();
    const auto K = prob.line_ids.size();
    const auto N = prob.bus_ids.size();
    const auto T = static_cast<std::size_t>(prob.horizon);
    UcAssignment a;
    a.u.assign(G, std::vector<double>(T, 0.0));
    a.v = a.w = a.p = a.u;
    a.f.assign(K, std::vector<double>(T, 0.0));
    a.theta.assign(N, std::vector<double>(T, 0.0));
    for (std::size_t j = 0; j < prob.columns.size(); ++j) {
        const auto& key = prob.columns[j].key;
        const auto e = static_cast<std::size_t>(key.entity);
        const auto t = static_cast<std::size_t>(key.t - 1);
        switch (key.kind) {
            case VarKind::U: a.u[e][t] = values[j]; break;
            case VarKind::V: a.v[e][t] = values[j]; break;
            case VarKind::W: a.w[e][t] = values[j]; break;
            case VarKind::P: a.p[e][t] = values[j]; break;
            case VarKind::F: a.f[e][t] = values[j]; break;
            case VarKind::THETA: a.theta[e][t] = values[j]; break;
        }
    }
    return a;
}

DailySchedule to_schedule(const UcAssignment& a) {
    DailySchedule s;
    s.u.resize(a.u.size());
    s.p.resize(a.p.size());
    for (std::size_t g = 0; g < a.u.size(); ++g) {
        for (std::size_t t = 0; t < a.u[g].size(); ++t) {
            const int on = a.u[g][t] > 0.5 ? 1 : 0;
            s.u[g].push_back(on);
            s.p[g].push_back(on ? std::max(0.0, a.p[g][t]) : 0.0);
        }
    }
    return s;
}

double ConstraintReport::max_residual() const {
    double m = 0.0;
    for (const auto& v : violations) m = std::max(m, v.residual);
    return m;
}

std::string ConstraintReport::summary(std::size_t max_items) const {
    if (violations.empty()) return "no violations";
    std::ostringstream os;
    os << violations.size() << " violation(s):";
    for (std::size_t i = 0; i < std::min(max_items, violations.size()); ++i) {
        const auto& v = violations[i];
        os << "\n  " << v.family << " at " << v.entity << ", t=" << v.t << ", residual " << v.residual;
    }
    if (violations.size() > max_items) os << "\n  ...";
    return os.str();
}

double uc_objective(const UcInstance& inst, const UcAssignment& a) {
    double obj = 0.0;
    for (std::size_t g = 0; g < inst.generators.size(); ++g) {
        const auto& gen = inst.generators[g];
        for (std::size_t t = 0; t < a.u[g].size(); ++t)
            obj += gen.c * a.p[g][t] + gen.c_nl * a.u[g][t] + gen.c_su * a.v[g][t];
    }
    return obj;
}

ConstraintReport evaluate_solution(const UcInstance& inst, const UcAssignment& a, double tol) {
    ConstraintReport rep;
    const int T = inst.horizon;
    auto check = [&](const char* family, const std::string& entity, int t, double residual) {
        if (residual > tol) rep.violations.push_back({family, entity, t, residual});
    };

    for (std::size_t g = 0; g < inst.generators.size(); ++g) {
        const auto& gen = inst.generators[g];
        const auto& u = a.u[g];
        const auto& v = a.v[g];
        const auto& w = a.w[g];
        const auto& p = a.p[g];
        for (int t = 1; t <= T; ++t) {
            const auto i = static_cast<std::size_t>(t - 1);
            for (double x : {u[i], v[i], w[i]})
                check("integrality", gen.id, t, std::max(std::fabs(x - std::round(x)), std::max(-x, x - 1.0)));
            check("capacity", gen.id, t, gen.p_min * u[i] - p[i]);
            check("capacity", gen.id, t, p[i] - gen.p_max * u[i]);

            const double u_prev = t > 1 ? u[i - 1] : static_cast<double>(gen.u0);
            const double p_prev = t > 1 ? p[i - 1] : gen.p0;
            check("logic", gen.id, t, std::fabs(u[i] - u_prev - v[i] + w[i]));

            double vs = 0.0;
            for (int s = std::max(1, t - gen.ut + 1); s <= t; ++s) vs += v[static_cast<std::size_t>(s - 1)];
            check("min up", gen.id, t, vs - u[i]);
            double ws = 0.0;
            for (int s = std::max(1, t - gen.dt + 1); s <= t; ++s) ws += w[static_cast<std::size_t>(s - 1)];
            check("min down", gen.id, t, ws - (1.0 - u[i]));

            if (gen.u0 == 1 && t <= gen.ut - gen.init_duration) check("initial up time", gen.id, t, 1.0 - u[i]);
            if (gen.u0 == 0 && t <= gen.dt - gen.init_duration) check("initial down time", gen.id, t, u[i]);

            check("ramp up", gen.id, t, p[i] - p_prev - gen.r_hr * u_prev - gen.r_su * v[i]);
            check("ramp down", gen.id, t, p_prev - p[i] - gen.r_hr * u[i] - gen.r_sd * w[i]);
        }
    }

    for (std::size_t n = 0; n < inst.buses.size(); ++n) {
        const auto& bus = inst.buses[n];
        for (int t = 1; t <= T; ++t) {
            const auto i = static_cast<std::size_t>(t - 1);
            double inj = -inst.demand[n][i];
            for (std::size_t g = 0; g < inst.generators.size(); ++g)
                if (inst.generators[g].bus == bus) inj += a.p[g][i];
            double out = 0.0;
            for (std::size_t k = 0; k < inst.lines.size(); ++k) {
                if (inst.lines[k].from_bus == bus) out += a.f[k][i];
                if (inst.lines[k].to_bus == bus) out -= a.f[k][i];
            }
            check("balance", bus, t, std::fabs(inj - out));
        }
        if (bus == inst.ref_bus)
            for (int t = 1; t <= T; ++t) check("reference angle", bus, t, std::fabs(a.theta[n][static_cast<std::size_t>(t - 1)]));
    }

    for (std::size_t k = 0; k < inst.lines.size(); ++k) {
        const auto& line = inst.lines[k];
        const auto i_from = *inst.bus_index(line.from_bus);
        const auto i_to = *inst.bus_index(line.to_bus);
        for (int t = 1; t <= T; ++t) {
            const auto i = static_cast<std::size_t>(t - 1);
            const double f = a.f[k][i];
            const double implied = kBaseMva * line.b * (a.theta[i_from][i] - a.theta[i_to][i]);
            check("flow", line.id, t, std::fabs(f - implied));
            check("line limit", line.id, t, std::fabs(f) - line.f_max);
        }
    }
    return rep;
}

namespace {

std::string lp_name(std::string s) {
    for (auto& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '.') ch = '_';
    return s;
}

void write_term(std::ostream& out, double coef, const std::string& name, bool first) {
    if (coef < 0) {
        out << " - " << -coef << ' ' << name;
    } else {
        out << (first ? " " : " + ") << coef << ' ' << name;
    }
}

}  // namespace

void write_lp(const MilpProblem& prob, std::ostream& out) {
    out.precision(17);
    std::vector<std::string> names;
    names.reserve(prob.columns.size());
    for (std::size_t j = 0; j < prob.columns.size(); ++j) names.push_back(lp_name(prob.column_name(static_cast<int>(j))));

    out << "\\ unit commitment MILP\nMinimize\n obj:";
    bool first = true;
    for (std::size_t j = 0; j < prob.columns.size(); ++j) {
        if (prob.columns[j].cost == 0.0) continue;
        write_term(out, prob.columns[j].cost, names[j], first);
        first = false;
    }
    if (first) out << " 0 " << names.front();
    out << "\nSubject To\n";
    for (std::size_t i = 0; i < prob.rows.size(); ++i) {
        const auto& r = prob.rows[i];
        out << ' ' << row_family_name(r.family) << '_' << r.entity << '_' << r.t << '_' << i << ':';
        for (std::size_t k = 0; k < r.index.size(); ++k)
            write_term(out, r.value[k], names[static_cast<std::size_t>(r.index[k])], k == 0);
        out << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << r.rhs << '\n';
    }
    out << "Bounds\n";
    for (std::size_t j = 0; j < prob.columns.size(); ++j)
        out << ' ' << prob.columns[j].lower << " <= " << names[j] << " <= " << prob.columns[j].upper << '\n';
    out << "Generals\n";
    for (std::size_t j = 0; j < prob.columns.size(); ++j)
        if (prob.columns[j].integer) out << ' ' << names[j] << '\n';
    out << "End\n";
}

}  // namespace ucr
