#include "ucr/error.hpp"
#include "ucr/kernels.hpp"
#include "ucr/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucr {

const char* lp_status_name(LpStatus s) noexcept {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::time_limit: return "time_limit";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One product-form update: B_new^{-1} = E B^{-1}, E = I except column r.
struct Eta {
    int r = 0;
    std::vector<double> col;
};

}  // namespace

struct SimplexSolver::Impl {
    using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

    SimplexOptions opts;
    int m = 0;  // rows
    int n = 0;  // structural columns
    int total = 0;

    // Structural columns in CSC; slack n+i is the unit column e_i.
    std::vector<int> col_start, row_idx;
    std::vector<double> val;
    std::vector<double> cost, lb, ub, base_lb, base_ub, rhs;

    std::vector<std::int8_t> status;
    std::vector<int> head;   // basic variable per position
    std::vector<double> x;   // nonbasic values (basic entries are stale)
    std::vector<double> xb;  // basic values by position

    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::vector<Eta> etas;

    std::vector<double> work_cb, work_y, work_alpha, work_rho;
    std::vector<double> weight;  // devex reference weights
    Eigen::VectorXd ev_in, ev_out;

    explicit Impl(const MilpProblem& prob, SimplexOptions o) : opts(o) {
        m = static_cast<int>(prob.rows.size());
        n = static_cast<int>(prob.columns.size());
        total = n + m;

        std::vector<int> counts(static_cast<std::size_t>(n), 0);
        for (const auto& r : prob.rows)
            for (int j : r.index) ++counts[static_cast<std::size_t>(j)];
        col_start.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int j = 0; j < n; ++j) col_start[j + 1] = col_start[j] + counts[static_cast<std::size_t>(j)];
        row_idx.resize(static_cast<std::size_t>(col_start[n]));
        val.resize(row_idx.size());
        std::vector<int> fill(col_start.begin(), col_start.end() - 1);
        for (int i = 0; i < m; ++i) {
            const auto& r = prob.rows[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < r.index.size(); ++k) {
                const int pos = fill[static_cast<std::size_t>(r.index[k])]++;
                row_idx[static_cast<std::size_t>(pos)] = i;
                val[static_cast<std::size_t>(pos)] = r.value[k];
            }
        }

        cost.assign(static_cast<std::size_t>(total), 0.0);
        lb.assign(static_cast<std::size_t>(total), 0.0);
        ub.assign(static_cast<std::size_t>(total), 0.0);
        rhs.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < n; ++j) {
            const auto& c = prob.columns[static_cast<std::size_t>(j)];
            cost[j] = c.cost;
            lb[j] = c.lower;
            ub[j] = c.upper;
        }
        for (int i = 0; i < m; ++i) {
            const auto& r = prob.rows[static_cast<std::size_t>(i)];
            rhs[i] = r.rhs;
            const auto s = static_cast<std::size_t>(n + i);
            switch (r.sense) {
                case Sense::le: lb[s] = 0.0; ub[s] = kInf; break;
                case Sense::ge: lb[s] = -kInf; ub[s] = 0.0; break;
                case Sense::eq: lb[s] = 0.0; ub[s] = 0.0; break;
            }
        }
        base_lb = lb;
        base_ub = ub;
        status.assign(static_cast<std::size_t>(total), Basis::at_lower);
        head.resize(static_cast<std::size_t>(m));
        x.assign(static_cast<std::size_t>(total), 0.0);
        xb.assign(static_cast<std::size_t>(m), 0.0);
        work_cb.resize(static_cast<std::size_t>(m));
        work_y.resize(static_cast<std::size_t>(m));
        work_alpha.resize(static_cast<std::size_t>(m));
        work_rho.resize(static_cast<std::size_t>(m));
        ev_in.resize(m);
        ev_out.resize(m);
        slack_basis();
    }

    void slack_basis() {
        for (int j = 0; j < n; ++j) status[j] = Basis::at_lower;
        for (int i = 0; i < m; ++i) {
            status[n + i] = Basis::basic;
            head[i] = n + i;
        }
    }

    // Puts nonbasic variables on a finite bound consistent with their status.
    void place_nonbasic() {
        for (int j = 0; j < total; ++j) {
            auto& st = status[j];
            if (st == Basis::basic) continue;
            const bool lo_fin = std::isfinite(lb[j]);
            const bool up_fin = std::isfinite(ub[j]);
            if (st == Basis::at_upper && !up_fin) st = lo_fin ? Basis::at_lower : Basis::free_zero;
            if (st == Basis::at_lower && !lo_fin) st = up_fin ? Basis::at_upper : Basis::free_zero;
            if (st == Basis::free_zero && (lo_fin || up_fin)) st = lo_fin ? Basis::at_lower : Basis::at_upper;
            x[j] = st == Basis::at_lower ? lb[j] : st == Basis::at_upper ? ub[j] : 0.0;
        }
    }

    bool load_basis(const Basis* warm) {
        if (!warm || warm->status.size() != static_cast<std::size_t>(total)) {
            slack_basis();
            return false;
        }
        int count = 0;
        for (auto s : warm->status) count += s == Basis::basic;
        if (count != m) {
            slack_basis();
            return false;
        }
        status = warm->status;
        int pos = 0;
        for (int j = 0; j < total; ++j)
            if (status[j] == Basis::basic) head[pos++] = j;
        return true;
    }

    bool factorize() {
        std::vector<Eigen::Triplet<double, int>> trip;
        trip.reserve(static_cast<std::size_t>(m) * 3);
        for (int p = 0; p < m; ++p) {
            const int j = head[p];
            if (j >= n) {
                trip.emplace_back(j - n, p, 1.0);
            } else {
                for (int k = col_start[j]; k < col_start[j + 1]; ++k) trip.emplace_back(row_idx[k], p, val[k]);
            }
        }
        SpMat B(m, m);
        B.setFromTriplets(trip.begin(), trip.end());
        B.makeCompressed();
        lu.analyzePattern(B);
        lu.factorize(B);
        etas.clear();
        return lu.info() == Eigen::Success;
    }

    void refactor() {
        if (m == 0) return;
        if (!factorize()) {
            // Fall back to the slack basis, which is always nonsingular.
            slack_basis();
            place_nonbasic();
            if (!factorize()) throw NumericalError("simplex: slack basis factorization failed");
        }
    }

    void ftran(std::vector<double>& v) {
        if (m == 0) return;
        ev_in = Eigen::Map<const Eigen::VectorXd>(v.data(), m);
        ev_out = lu.solve(ev_in);
        std::copy(ev_out.data(), ev_out.data() + m, v.begin());
        for (const auto& e : etas) {
            const double xr = v[e.r] / e.col[e.r];
            if (xr != 0.0) kernels::axpy(-xr, e.col, v);
            v[e.r] = xr;
        }
    }

    void btran(std::vector<double>& v) {
        if (m == 0) return;
        for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
            const auto& e = *it;
            const double d = kernels::dot(v, e.col);
            v[e.r] = (v[e.r] - (d - v[e.r] * e.col[e.r])) / e.col[e.r];
        }
        ev_in = Eigen::Map<const Eigen::VectorXd>(v.data(), m);
        ev_out = lu.transpose().solve(ev_in);
        std::copy(ev_out.data(), ev_out.data() + m, v.begin());
    }

    void load_column(int j, std::vector<double>& v) const {
        std::fill(v.begin(), v.end(), 0.0);
        if (j >= n) {
            v[j - n] = 1.0;
        } else {
            for (int k = col_start[j]; k < col_start[j + 1]; ++k) v[row_idx[k]] = val[k];
        }
    }

    // x_B = B^{-1} (rhs - N x_N), right after a refactorization.
    void compute_xb() {
        std::vector<double> r(rhs);
        for (int j = 0; j < total; ++j) {
            if (status[j] == Basis::basic || x[j] == 0.0) continue;
            if (j >= n) {
                r[j - n] -= x[j];
            } else {
                for (int k = col_start[j]; k < col_start[j + 1]; ++k) r[row_idx[k]] -= val[k] * x[j];
            }
        }
        ftran(r);
        xb = std::move(r);
    }

    // Reduced cost a_j'y subtracted from c_j (c_j = 0 in phase 1).
    double reduced_cost(int j, const std::vector<double>& y, bool phase1) const {
        return (phase1 ? 0.0 : cost[j]) - row_dot(j, y);
    }

    double row_dot(int j, const std::vector<double>& y) const {
        if (j >= n) return y[j - n];
        double s = 0.0;
        for (int k = col_start[j]; k < col_start[j + 1]; ++k) s += y[row_idx[k]] * val[k];
        return s;
    }

    // True if the current merit beats the best seen in this phase.
    bool progressed(bool phase1, double& best_inf, double& best_obj) const {
        if (phase1) {
            const double v = infeasibility();
            if (v >= best_inf - 1e-13) return false;
            best_inf = v;
            return true;
        }
        double v = 0.0;
        for (int j = 0; j < n; ++j)
            if (status[j] != Basis::basic) v += cost[j] * x[j];
        for (int p = 0; p < m; ++p)
            if (head[p] < n) v += cost[head[p]] * xb[p];
        if (v >= best_obj - 1e-12 * std::max(1.0, std::fabs(best_obj))) return false;
        best_obj = v;
        return true;
    }

    double infeasibility() const {
        double s = 0.0;
        for (int p = 0; p < m; ++p) {
            const int j = head[p];
            s += std::max(0.0, lb[j] - xb[p]) + std::max(0.0, xb[p] - ub[j]);
        }
        return s;
    }

    // Distance the basic variable at position p may travel before it blocks,
    // per unit step of the entering variable in direction `dir`. Infeasible
    // basics moving toward their violated bound block there.
    bool blocking(int p, double dir, double& dist, double& rate, double& target) const {
        const double a = work_alpha[p];
        if (std::fabs(a) <= opts.pivot_tol) return false;
        const double g = -dir * a;
        const int j = head[p];
        const double v = xb[p];
        const double ptol = opts.primal_tol;
        if (v < lb[j] - ptol) {
            if (g <= 0.0) return false;
            target = lb[j];
            dist = lb[j] - v;
        } else if (v > ub[j] + ptol) {
            if (g >= 0.0) return false;
            target = ub[j];
            dist = v - ub[j];
        } else if (g < 0.0) {
            if (!std::isfinite(lb[j])) return false;
            target = lb[j];
            dist = std::max(0.0, v - lb[j]);
        } else {
            if (!std::isfinite(ub[j])) return false;
            target = ub[j];
            dist = std::max(0.0, ub[j] - v);
        }
        rate = std::fabs(g);
        return true;
    }

    LpResult solve(const Basis* warm, std::optional<Clock::time_point> deadline) {
        LpResult res;
        load_basis(warm);
        place_nonbasic();
        refactor();
        compute_xb();

        const long max_iter = opts.max_iterations > 0 ? opts.max_iterations : 50L * (m + n) + 10000;
        const double ptol = opts.primal_tol;
        const bool devex = opts.pricing == Pricing::devex;
        long iters = 0;
        // Progress is judged on the true merit (sum of infeasibilities, then
        // cost), not step length: Harris overshoot can make two short steps
        // undo each other without ever looking degenerate.
        long stalled = 0;
        double best_inf = kInf;
        double best_obj = kInf;
        bool bland = false;
        bool fresh = true;  // no pivots since the last refactorization
        int failed_ratio = 0;
        if (devex) weight.assign(static_cast<std::size_t>(total), 1.0);

        while (true) {
            if (static_cast<int>(etas.size()) >= opts.refactor_interval) {
                refactor();
                compute_xb();
                fresh = true;
            }
            if (deadline && (iters & 31) == 0 && Clock::now() > *deadline) {
                res.status = LpStatus::time_limit;
                break;
            }
            if (iters > max_iter) throw NumericalError("simplex: iteration limit exceeded");

            bool phase1 = false;
            for (int p = 0; p < m; ++p) {
                const int j = head[p];
                double c = 0.0;
                if (xb[p] < lb[j] - ptol) {
                    c = -1.0;
                    phase1 = true;
                } else if (xb[p] > ub[j] + ptol) {
                    c = 1.0;
                    phase1 = true;
                }
                work_cb[p] = c;
            }
            if (!phase1)
                for (int p = 0; p < m; ++p) work_cb[p] = cost[head[p]];
            if (progressed(phase1, best_inf, best_obj)) {
                stalled = 0;
                bland = false;
            } else if (++stalled > opts.stall_threshold) {
                bland = true;
            }
            work_y = work_cb;
            btran(work_y);

            // Pricing.
            int q = -1;
            double dq = 0.0;
            double best = 0.0;
            for (int j = 0; j < total; ++j) {
                const auto st = status[j];
                if (st == Basis::basic || lb[j] == ub[j]) continue;
                const double d = reduced_cost(j, work_y, phase1);
                double viol = 0.0;
                if (st == Basis::at_lower && d < -opts.dual_tol) viol = -d;
                else if (st == Basis::at_upper && d > opts.dual_tol) viol = d;
                else if (st == Basis::free_zero && std::fabs(d) > opts.dual_tol) viol = std::fabs(d);
                if (viol <= 0.0) continue;
                if (bland) {
                    q = j;
                    dq = d;
                    break;
                }
                const double score = devex ? viol * viol / weight[j] : viol;
                if (score > best) {
                    best = score;
                    q = j;
                    dq = d;
                }
            }

            if (q < 0) {
                if (!fresh) {
                    // Confirm on a clean factorization before declaring a result.
                    refactor();
                    compute_xb();
                    fresh = true;
                    continue;
                }
                res.status = phase1 ? LpStatus::infeasible : LpStatus::optimal;
                break;
            }

            load_column(q, work_alpha);
            ftran(work_alpha);
            const double dir = dq < 0.0 ? 1.0 : -1.0;

            // Harris two-pass ratio test. Under Bland's rule the tolerance is
            // dropped and the lowest-index candidate among numerically
            // acceptable pivots at the minimum ratio is taken instead.
            const double slack = bland ? 0.0 : ptol;
            int r = -1;
            double theta = kInf;
            double leave_target = 0.0;
            double theta_max = kInf;
            for (int p = 0; p < m; ++p) {
                double dist, rate, target;
                if (blocking(p, dir, dist, rate, target)) theta_max = std::min(theta_max, (dist + slack) / rate);
            }
            double best_alpha = 0.0;
            for (int p = 0; p < m; ++p) {
                double dist, rate, target;
                if (blocking(p, dir, dist, rate, target) && dist / rate <= theta_max)
                    best_alpha = std::max(best_alpha, std::fabs(work_alpha[p]));
            }
            for (int p = 0; p < m; ++p) {
                double dist, rate, target;
                if (!blocking(p, dir, dist, rate, target) || dist / rate > theta_max) continue;
                const double a = std::fabs(work_alpha[p]);
                const bool take = bland ? a >= 0.01 * best_alpha && (r < 0 || head[p] < head[r]) : a == best_alpha && r < 0;
                if (take) {
                    r = p;
                    theta = dist / rate;
                    leave_target = target;
                }
            }

            const double range = ub[q] - lb[q];
            const bool flip = std::isfinite(range) && range <= theta;
            if (r < 0 && !flip) {
                if (!phase1) {
                    res.status = LpStatus::unbounded;
                    break;
                }
                if (++failed_ratio > 3) throw NumericalError("simplex: phase 1 ratio test found no pivot");
                refactor();
                compute_xb();
                fresh = true;
                continue;
            }
            failed_ratio = 0;
            if (flip) theta = range;

            const double step = dir * theta;
            if (theta != 0.0) kernels::axpy(-step, work_alpha, xb);
            ++iters;
            fresh = false;

            if (flip) {
                status[q] = status[q] == Basis::at_upper ? Basis::at_lower : Basis::at_upper;
                x[q] = status[q] == Basis::at_upper ? ub[q] : lb[q];
                continue;
            }

            const int leaving = head[r];
            if (devex) update_weights(q, r, leaving);

            const double entering_value = x[q] + step;
            status[leaving] = leave_target == ub[leaving] && lb[leaving] != ub[leaving] ? Basis::at_upper : Basis::at_lower;
            x[leaving] = leave_target;
            head[r] = q;
            status[q] = Basis::basic;
            xb[r] = entering_value;
            etas.push_back({r, work_alpha});
        }

        res.iterations = iters;
        if (res.status == LpStatus::optimal) {
            res.values.assign(static_cast<std::size_t>(n), 0.0);
            for (int j = 0; j < n; ++j) res.values[j] = x[j];
            for (int p = 0; p < m; ++p)
                if (head[p] < n) res.values[head[p]] = xb[p];
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += cost[j] * res.values[j];
            res.objective = obj;
        }
        return res;
    }

    // Devex reference weights, updated from the pivot row before the basis
    // change is applied.
    void update_weights(int q, int r, int leaving) {
        std::fill(work_rho.begin(), work_rho.end(), 0.0);
        work_rho[r] = 1.0;
        btran(work_rho);
        const double arq = work_alpha[r];
        const double wq = weight[q];
        double wmax = 0.0;
        for (int j = 0; j < total; ++j) {
            if (status[j] == Basis::basic || j == q) continue;
            const double arj = row_dot(j, work_rho);
            if (arj == 0.0) continue;
            const double ratio = arj / arq;
            weight[j] = std::max(weight[j], ratio * ratio * wq);
            wmax = std::max(wmax, weight[j]);
        }
        weight[leaving] = std::max(wq / (arq * arq), 1.0);
        if (wmax > 1e8) std::fill(weight.begin(), weight.end(), 1.0);
    }
};

SimplexSolver::SimplexSolver(const MilpProblem& prob, SimplexOptions opts)
    : impl_(std::make_unique<Impl>(prob, opts)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

std::size_t SimplexSolver::num_columns() const { return static_cast<std::size_t>(impl_->n); }
std::size_t SimplexSolver::num_rows() const { return static_cast<std::size_t>(impl_->m); }

void SimplexSolver::set_bounds(int column, double lower, double upper) {
    impl_->lb[column] = lower;
    impl_->ub[column] = upper;
}

void SimplexSolver::reset_bounds() {
    std::copy(impl_->base_lb.begin(), impl_->base_lb.begin() + impl_->n, impl_->lb.begin());
    std::copy(impl_->base_ub.begin(), impl_->base_ub.begin() + impl_->n, impl_->ub.begin());
}

double SimplexSolver::lower(int column) const { return impl_->lb[column]; }
double SimplexSolver::upper(int column) const { return impl_->ub[column]; }

LpResult SimplexSolver::solve(const Basis* warm, std::optional<Clock::time_point> deadline) {
    return impl_->solve(warm, deadline);
}

Basis SimplexSolver::basis() const { return Basis{impl_->status}; }

LpResult solve_lp(const MilpProblem& prob, SimplexOptions opts) {
    SimplexSolver s(prob, opts);
    return s.solve();
}

}  // namespace ucr
