#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace ucr::oracle {

namespace {

constexpr double kEps = 1e-9;

class Tableau {
public:
    Tableau(std::size_t m, std::size_t cols) : m_(m), cols_(cols), t_(m * (cols + 1), 0.0), basis_(m, 0) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    std::size_t& basis(std::size_t i) { return basis_[i]; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
    }

    // Minimizes cost over the current basis with Bland's rule. Returns false
    // if unbounded.
    template <class Allowed>
    bool run(const std::vector<double>& cost, Allowed allowed) {
        std::vector<char> in_basis(cols_, 0);
        for (;;) {
            std::fill(in_basis.begin(), in_basis.end(), 0);
            for (auto b : basis_) in_basis[b] = 1;
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_ && enter == cols_; ++j) {
                if (in_basis[j] || !allowed(j)) continue;
                double d = cost[j];
                for (std::size_t i = 0; i < m_; ++i) d -= cost[basis_[i]] * at(i, j);
                if (d < -kEps) enter = j;
            }
            if (enter == cols_) return true;
            std::size_t leave = m_;
            double best = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kEps) continue;
                const double ratio = rhs(i) / a;
                if (leave == m_ || ratio < best - kEps || (ratio <= best + kEps && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t m_, cols_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

std::optional<DenseLpSolution> solve_dense_lp(const DenseLp& lp) {
    const std::size_t n = lp.c.size();
    const std::size_t m = lp.rows.size();
    std::vector<DenseLp::Row> rows = lp.rows;
    std::size_t n_slack = 0, n_art = 0;
    double bscale = 1.0;
    for (auto& r : rows) {
        r.a.resize(n, 0.0);
        if (r.b < 0) {
            for (auto& v : r.a) v = -v;
            r.b = -r.b;
            if (r.sense == '<') r.sense = '>';
            else if (r.sense == '>') r.sense = '<';
        }
        bscale = std::max(bscale, r.b);
        if (r.sense != '=') ++n_slack;
        if (r.sense != '<') ++n_art;
    }
    const std::size_t cols = n + n_slack + n_art;
    Tableau tab(m, cols);
    std::vector<char> is_art(cols, 0);
    std::size_t next_slack = n, next_art = n + n_slack;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& r = rows[i];
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = r.a[j];
        tab.rhs(i) = r.b;
        if (r.sense == '<') {
            tab.at(i, next_slack) = 1.0;
            tab.basis(i) = next_slack++;
        } else {
            if (r.sense == '>') tab.at(i, next_slack++) = -1.0;
            tab.at(i, next_art) = 1.0;
            is_art[next_art] = 1;
            tab.basis(i) = next_art++;
        }
    }

    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) phase1[j] = is_art[j] ? 1.0 : 0.0;
    tab.run(phase1, [](std::size_t) { return true; });
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (is_art[tab.basis(i)]) infeas += tab.rhs(i);
    if (infeas > 1e-7 * bscale) return std::nullopt;
    for (std::size_t i = 0; i < m; ++i) {
        if (!is_art[tab.basis(i)]) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            if (!is_art[j] && std::fabs(tab.at(i, j)) > kEps) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    std::vector<double> phase2(cols, 0.0);
    std::copy(lp.c.begin(), lp.c.end(), phase2.begin());
    if (!tab.run(phase2, [&is_art](std::size_t j) { return !is_art[j]; })) return std::nullopt;

    DenseLpSolution sol;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis(i) < n) sol.x[tab.basis(i)] = tab.rhs(i);
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
    return sol;
}

UcInstance random_instance(std::uint64_t seed, const RandomShape& shape) {
    std::mt19937_64 rng(seed);
    auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    UcInstance inst;
    const int G = pick(shape.min_gens, shape.max_gens);
    int T = pick(shape.min_hours, shape.max_hours);
    while (G * T > shape.max_binary_cells) --T;
    const int N = pick(1, shape.max_buses);
    inst.horizon = T;
    for (int n = 0; n < N; ++n) inst.buses.push_back("b" + std::to_string(n + 1));
    inst.ref_bus = inst.buses.front();
    // A path keeps the network connected; two buses may get a parallel line.
    for (int n = 1; n < N; ++n)
        inst.lines.push_back({"l" + std::to_string(n), inst.buses[n - 1], inst.buses[n], uni(1.0, 10.0), uni(15.0, 60.0)});
    if (N == 2 && pick(0, 1) == 1) inst.lines.push_back({"l2", "b1", "b2", uni(1.0, 10.0), uni(15.0, 60.0)});

    double cap = 0.0;
    for (int g = 0; g < G; ++g) {
        Generator gen;
        gen.id = "g" + std::to_string(g + 1);
        gen.bus = inst.buses[static_cast<std::size_t>(pick(0, N - 1))];
        gen.p_max = std::round(uni(20.0, 80.0));
        gen.p_min = std::round(gen.p_max * uni(0.1, 0.5));
        gen.c = std::round(uni(10.0, 40.0) * 10.0) / 10.0;
        gen.c_nl = std::round(uni(0.0, 60.0));
        gen.c_su = std::round(uni(0.0, 200.0));
        gen.ut = pick(1, 3);
        gen.dt = pick(1, 3);
        gen.r_hr = std::round(gen.p_max * uni(0.3, 1.0));
        gen.r_su = std::round(uni(gen.p_min, gen.p_max));
        gen.r_sd = std::round(uni(gen.p_min, gen.p_max));
        gen.u0 = pick(0, 1);
        gen.p0 = gen.u0 ? std::round(uni(gen.p_min, gen.p_max)) : 0.0;
        gen.init_duration = pick(1, 4);
        cap += gen.p_max;
        inst.generators.push_back(gen);
    }
    inst.demand.assign(static_cast<std::size_t>(N), std::vector<double>(static_cast<std::size_t>(T), 0.0));
    for (int t = 0; t < T; ++t) {
        const double total = cap * uni(0.25, 0.75);
        std::vector<double> share(static_cast<std::size_t>(N));
        double sum = 0.0;
        for (auto& s : share) sum += (s = uni(0.2, 1.0));
        for (int n = 0; n < N; ++n)
            inst.demand[static_cast<std::size_t>(n)][static_cast<std::size_t>(t)] =
                std::round(total * share[static_cast<std::size_t>(n)] / sum * 10.0) / 10.0;
    }
    return inst;
}

namespace {

struct Expr {
    std::vector<std::pair<std::size_t, double>> terms;
    double k = 0.0;

    Expr& add(const Expr& o, double s) {
        for (const auto& [j, a] : o.terms) terms.emplace_back(j, s * a);
        k += s * o.k;
        return *this;
    }
};

// Dispatch LP for a fixed commitment. P(g,t) = p_min + x for committed cells,
// theta(n,t) = x - L on non-reference buses.
struct DispatchModel {
    DenseLp lp;
    double constant = 0.0;
};

std::optional<DispatchModel> dispatch_model(const UcInstance& inst, const std::vector<std::vector<int>>& u) {
    const auto G = inst.generators.size();
    const auto T = static_cast<std::size_t>(inst.horizon);
    const auto N = inst.buses.size();
    const double L = 2.0 * std::numbers::pi * static_cast<double>(N);
    std::vector<std::vector<long>> pvar(G, std::vector<long>(T, -1));
    std::vector<std::vector<long>> thvar(N, std::vector<long>(T, -1));
    std::size_t nv = 0;
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t t = 0; t < T; ++t)
            if (u[g][t]) pvar[g][t] = static_cast<long>(nv++);
    for (std::size_t n = 0; n < N; ++n)
        if (inst.buses[n] != inst.ref_bus)
            for (std::size_t t = 0; t < T; ++t) thvar[n][t] = static_cast<long>(nv++);

    auto P = [&](std::size_t g, long t) {  // t is 0-based; -1 is the initial hour
        Expr e;
        const auto& gen = inst.generators[g];
        if (t < 0) {
            e.k = gen.p0;
        } else if (pvar[g][static_cast<std::size_t>(t)] >= 0) {
            e.terms.emplace_back(static_cast<std::size_t>(pvar[g][static_cast<std::size_t>(t)]), 1.0);
            e.k = gen.p_min;
        }
        return e;
    };
    auto theta = [&](std::size_t n, std::size_t t) {
        Expr e;
        if (thvar[n][t] >= 0) {
            e.terms.emplace_back(static_cast<std::size_t>(thvar[n][t]), 1.0);
            e.k = -L;
        }
        return e;
    };
    auto U = [&](std::size_t g, long t) { return t < 0 ? inst.generators[g].u0 : u[g][static_cast<std::size_t>(t)]; };

    DispatchModel model;
    model.lp.c.assign(nv, 0.0);
    auto add_row = [&](const Expr& e, char sense, double rhs) {
        DenseLp::Row r;
        r.a.assign(nv, 0.0);
        for (const auto& [j, a] : e.terms) r.a[j] += a;
        r.sense = sense;
        r.b = rhs - e.k;
        bool empty = true;
        for (double a : r.a) empty = empty && a == 0.0;
        if (empty) {
            const bool ok = sense == '<' ? 0.0 <= r.b + 1e-9 : sense == '>' ? 0.0 >= r.b - 1e-9 : std::fabs(r.b) <= 1e-9;
            return ok;
        }
        model.lp.rows.push_back(std::move(r));
        return true;
    };

    bool ok = true;
    for (std::size_t g = 0; g < G; ++g) {
        const auto& gen = inst.generators[g];
        for (std::size_t t = 0; t < T; ++t) {
            const long tt = static_cast<long>(t);
            if (u[g][t]) {
                model.constant += gen.c * gen.p_min + gen.c_nl;
                model.lp.c[static_cast<std::size_t>(pvar[g][t])] = gen.c;
                Expr x;
                x.terms.emplace_back(static_cast<std::size_t>(pvar[g][t]), 1.0);
                ok = ok && add_row(x, '<', gen.p_max - gen.p_min);
            }
            const int v = U(g, tt) > U(g, tt - 1) ? 1 : 0;
            const int w = U(g, tt) < U(g, tt - 1) ? 1 : 0;
            model.constant += gen.c_su * v;
            Expr up = P(g, tt);
            up.add(P(g, tt - 1), -1.0);
            ok = ok && add_row(up, '<', gen.r_hr * U(g, tt - 1) + gen.r_su * v);
            Expr down = P(g, tt - 1);
            down.add(P(g, tt), -1.0);
            ok = ok && add_row(down, '<', gen.r_hr * U(g, tt) + gen.r_sd * w);
        }
    }
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t t = 0; t < T; ++t) {
            if (thvar[n][t] < 0) continue;
            Expr e;
            e.terms.emplace_back(static_cast<std::size_t>(thvar[n][t]), 1.0);
            ok = ok && add_row(e, '<', 2.0 * L);
        }
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<Expr> flow;
        for (const auto& line : inst.lines) {
            const auto i = *inst.bus_index(line.from_bus);
            const auto j = *inst.bus_index(line.to_bus);
            Expr f = theta(i, t);
            f.add(theta(j, t), -1.0);
            for (auto& [idx, a] : f.terms) a *= 100.0 * line.b;
            f.k *= 100.0 * line.b;
            ok = ok && add_row(f, '<', line.f_max);
            ok = ok && add_row(f, '>', -line.f_max);
            flow.push_back(f);
        }
        for (std::size_t n = 0; n < N; ++n) {
            Expr bal;
            for (std::size_t g = 0; g < G; ++g)
                if (inst.generators[g].bus == inst.buses[n]) bal.add(P(g, static_cast<long>(t)), 1.0);
            for (std::size_t k = 0; k < inst.lines.size(); ++k) {
                if (inst.lines[k].from_bus == inst.buses[n]) bal.add(flow[k], -1.0);
                if (inst.lines[k].to_bus == inst.buses[n]) bal.add(flow[k], 1.0);
            }
            ok = ok && add_row(bal, '=', inst.demand[n][t]);
        }
    }
    if (!ok) return std::nullopt;
    return model;
}

bool sequence_ok(const Generator& gen, const std::vector<int>& u, int T, const std::vector<int>& forced) {
    auto at = [&](int t) { return t == 0 ? gen.u0 : u[static_cast<std::size_t>(t - 1)]; };
    for (int t = 1; t <= T; ++t) {
        if (forced[static_cast<std::size_t>(t - 1)] >= 0 && forced[static_cast<std::size_t>(t - 1)] != at(t)) return false;
        if (gen.u0 == 1 && t <= gen.ut - gen.init_duration && at(t) != 1) return false;
        if (gen.u0 == 0 && t <= gen.dt - gen.init_duration && at(t) != 0) return false;
        int starts = 0, stops = 0;
        for (int s = std::max(1, t - gen.ut + 1); s <= t; ++s) starts += at(s) > at(s - 1);
        for (int s = std::max(1, t - gen.dt + 1); s <= t; ++s) stops += at(s) < at(s - 1);
        if (starts > at(t) || stops > 1 - at(t)) return false;
    }
    return true;
}

}  // namespace

std::optional<double> dispatch_cost(const UcInstance& inst, const std::vector<std::vector<int>>& u) {
    auto model = dispatch_model(inst, u);
    if (!model) return std::nullopt;
    const auto sol = solve_dense_lp(model->lp);
    if (!sol) return std::nullopt;
    return model->constant + sol->objective;
}

BruteForceResult brute_force(const UcInstance& inst, const FreezeMask* mask) {
    const int T = inst.horizon;
    const auto G = inst.generators.size();
    BruteForceResult out;

    // Per unit, every sequence that passes the commitment rules and the mask.
    std::vector<std::vector<std::vector<int>>> options(G);
    for (std::size_t g = 0; g < G; ++g) {
        const auto& gen = inst.generators[g];
        std::vector<int> forced(static_cast<std::size_t>(T), -1);
        if (mask)
            for (const auto& e : mask->entries())
                if (e.g == gen.id) forced[static_cast<std::size_t>(e.t - 1)] = e.u;
        for (unsigned bits = 0; bits < (1u << T); ++bits) {
            std::vector<int> u(static_cast<std::size_t>(T));
            for (int t = 0; t < T; ++t) u[static_cast<std::size_t>(t)] = (bits >> t) & 1u;
            if (sequence_ok(gen, u, T, forced)) options[g].push_back(std::move(u));
        }
        if (options[g].empty()) return out;
    }

    const auto demand = inst.total_demand_profile();
    struct Candidate {
        double bound;
        std::vector<std::size_t> pick;
    };
    std::vector<Candidate> cands;
    std::vector<std::size_t> pick(G, 0);
    // Odometer over the product of per-unit options.
    for (;;) {
        ++out.patterns;
        double bound = 0.0;
        bool possible = true;
        for (int t = 0; t < T && possible; ++t) {
            double lo = 0.0, hi = 0.0;
            std::vector<std::pair<double, double>> fill;  // (c, headroom)
            for (std::size_t g = 0; g < G; ++g) {
                if (!options[g][pick[g]][static_cast<std::size_t>(t)]) continue;
                const auto& gen = inst.generators[g];
                lo += gen.p_min;
                hi += gen.p_max;
                bound += gen.c * gen.p_min;
                fill.emplace_back(gen.c, gen.p_max - gen.p_min);
            }
            const double d = demand[static_cast<std::size_t>(t)];
            if (d < lo - 1e-9 || d > hi + 1e-9) {
                possible = false;
                break;
            }
            std::sort(fill.begin(), fill.end());
            double rest = d - lo;
            for (const auto& [c, room] : fill) {
                const double take = std::min(room, std::max(0.0, rest));
                bound += c * take;
                rest -= take;
            }
        }
        if (possible) {
            for (std::size_t g = 0; g < G; ++g) {
                const auto& gen = inst.generators[g];
                const auto& u = options[g][pick[g]];
                for (int t = 0; t < T; ++t) {
                    const int prev = t == 0 ? gen.u0 : u[static_cast<std::size_t>(t - 1)];
                    bound += gen.c_nl * u[static_cast<std::size_t>(t)];
                    if (u[static_cast<std::size_t>(t)] > prev) bound += gen.c_su;
                }
            }
            cands.push_back({bound, pick});
        }
        std::size_t g = 0;
        while (g < G && ++pick[g] == options[g].size()) pick[g++] = 0;
        if (g == G) break;
    }

    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.bound < b.bound; });
    for (const auto& cand : cands) {
        if (out.feasible && cand.bound >= out.objective - 1e-9 * std::max(1.0, std::fabs(out.objective))) break;
        std::vector<std::vector<int>> u(G);
        for (std::size_t g = 0; g < G; ++g) u[g] = options[g][cand.pick[g]];
        ++out.lps_solved;
        const auto cost = dispatch_cost(inst, u);
        if (cost && (!out.feasible || *cost < out.objective)) {
            out.feasible = true;
            out.objective = *cost;
            out.u = std::move(u);
        }
    }
    return out;
}

}  // namespace ucr::oracle
