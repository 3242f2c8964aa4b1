#include "ucr/error.hpp"
#include "ucr/freeze_mask.hpp"
#include "ucr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <unordered_set>

namespace ucr {

const char* milp_status_name(MilpStatus s) noexcept {
    switch (s) {
        case MilpStatus::optimal: return "optimal";
        case MilpStatus::infeasible: return "infeasible";
        case MilpStatus::gap_limit: return "gap_limit";
        case MilpStatus::time_limit: return "time_limit";
        case MilpStatus::node_limit: return "node_limit";
    }
    return "?";
}

namespace {

using Clock = SimplexSolver::Clock;

constexpr double kIntTol = 1e-6;
// The rounding heuristic runs at the root and then on every n-th node LP.
constexpr long kHeuristicInterval = 10;

struct BoundChange {
    int column;
    double lower;
    double upper;
    std::shared_ptr<const BoundChange> parent;
};

struct Node {
    std::shared_ptr<const BoundChange> path;
    std::shared_ptr<const Basis> basis;
    double bound = -std::numeric_limits<double>::infinity();
    long id = 0;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class BranchAndBound {
public:
    BranchAndBound(const MilpProblem& prob, const MilpParams& params)
        : prob_(prob), params_(params), lp_(prob) {
        for (std::size_t j = 0; j < prob.columns.size(); ++j)
            if (prob.columns[j].integer) {
                binaries_.push_back(static_cast<int>(j));
                if (prob.columns[j].key.kind == VarKind::U) commit_.push_back(static_cast<int>(j));
            }
    }

    MilpResult run() {
        const auto start = Clock::now();
        if (params_.time_limit)
            deadline_ = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*params_.time_limit));

        MilpResult out;
        auto& st = out.stats;
        bool stopped_by_limit = false;
        MilpStatus limit_status = MilpStatus::time_limit;

        std::vector<Node> stack;
        std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
        stack.push_back(Node{nullptr, nullptr, -std::numeric_limits<double>::infinity(), next_id_++});
        bool best_first = false;

        auto open_empty = [&] { return best_first ? heap.empty() : stack.empty(); };
        auto open_bound = [&] {
            double lb = std::numeric_limits<double>::infinity();
            if (best_first) {
                if (!heap.empty()) lb = heap.top().bound;
            } else {
                for (const auto& n : stack) lb = std::min(lb, n.bound);
            }
            return lb;
        };
        auto gap_closed = [&](double lb) {
            return incumbent_ && incumbent_obj_ - lb <= params_.gap_tol * std::fabs(incumbent_obj_);
        };

        while (!open_empty()) {
            if (incumbent_ && !best_first) {
                best_first = true;
                for (auto& n : stack) heap.push(std::move(n));
                stack.clear();
            }
            if (incumbent_ && gap_closed(open_bound())) break;
            if (params_.node_limit && st.nodes >= *params_.node_limit) {
                stopped_by_limit = true;
                limit_status = MilpStatus::node_limit;
                break;
            }
            if (deadline_ && Clock::now() > *deadline_) {
                stopped_by_limit = true;
                break;
            }

            Node node;
            if (best_first) {
                node = heap.top();
                heap.pop();
            } else {
                node = std::move(stack.back());
                stack.pop_back();
            }
            if (incumbent_ && node.bound >= incumbent_obj_ - prune_eps()) continue;

            apply_path(node.path);
            LpResult lp = solve_node(node.basis.get());
            ++st.nodes;
            st.simplex_iters += lp.iterations;
            if (lp.status == LpStatus::time_limit) {
                stopped_by_limit = true;
                // Requeue so the reported bound still covers this subtree.
                if (best_first) heap.push(node); else stack.push_back(node);
                break;
            }
            if (lp.status == LpStatus::unbounded)
                throw NumericalError("branch-and-bound: LP relaxation is unbounded");
            if (lp.status != LpStatus::optimal) continue;

            auto basis = std::make_shared<const Basis>(lp_.basis());
            if (st.nodes == 1) {
                st.root_bound = lp.objective;
                root_basis_ = basis;
            }
            if (st.nodes % kHeuristicInterval == 1 && !(incumbent_ && lp.objective >= incumbent_obj_ - prune_eps()))
                rounding_heuristic(lp.values, st);
            if (incumbent_ && lp.objective >= incumbent_obj_ - prune_eps()) continue;

            const int branch_col = select_branch(lp.values);
            if (branch_col < 0) {
                set_incumbent(lp.values, lp.objective);
                continue;
            }

            const double v = lp.values[static_cast<std::size_t>(branch_col)];
            const double lo = lp_.lower(branch_col);
            const double hi = lp_.upper(branch_col);
            Node down{std::make_shared<const BoundChange>(BoundChange{branch_col, lo, std::floor(v), node.path}), basis,
                      lp.objective, next_id_++};
            Node up{std::make_shared<const BoundChange>(BoundChange{branch_col, std::ceil(v), hi, node.path}), basis,
                    lp.objective, next_id_++};
            if (best_first) {
                heap.push(std::move(down));
                heap.push(std::move(up));
            } else if (v - std::floor(v) >= 0.5) {
                // Last pushed is explored first: follow the nearer rounding.
                stack.push_back(std::move(down));
                stack.push_back(std::move(up));
            } else {
                stack.push_back(std::move(up));
                stack.push_back(std::move(down));
            }
        }

        st.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
        const bool exhausted = open_empty();
        if (incumbent_) {
            out.solution = incumbent_values_;
            out.objective = incumbent_obj_;
            const double lb = exhausted ? incumbent_obj_ : std::min(open_bound(), incumbent_obj_);
            st.best_bound = lb;
            st.gap = std::fabs(incumbent_obj_) > 0.0 ? (incumbent_obj_ - lb) / std::fabs(incumbent_obj_)
                                                     : incumbent_obj_ - lb;
            if (st.gap < 0.0) st.gap = 0.0;
            if (exhausted) st.status = MilpStatus::optimal;
            else if (stopped_by_limit) st.status = limit_status;
            else st.status = MilpStatus::gap_limit;
        } else {
            st.best_bound = exhausted ? std::numeric_limits<double>::infinity() : open_bound();
            st.status = exhausted ? MilpStatus::infeasible : limit_status;
        }
        return out;
    }

private:
    double prune_eps() const { return 1e-9 * std::max(1.0, std::fabs(incumbent_obj_)); }

    void apply_path(const std::shared_ptr<const BoundChange>& path) {
        lp_.reset_bounds();
        // Newest change on a column wins; walk leaf to root.
        touched_.clear();
        for (const BoundChange* c = path.get(); c; c = c->parent.get()) {
            if (!touched_.insert(c->column).second) continue;
            lp_.set_bounds(c->column, c->lower, c->upper);
        }
    }

    LpResult solve_node(const Basis* warm) {
        try {
            return lp_.solve(warm, deadline_);
        } catch (const NumericalError&) {
            if (!warm) throw;
            return lp_.solve(nullptr, deadline_);
        }
    }

    // Commitment columns are branched on first; transition columns only once
    // every commitment is integral.
    int select_branch(const std::vector<double>& x) const {
        const int j = most_fractional(x, commit_);
        return j >= 0 ? j : most_fractional(x, binaries_);
    }

    int most_fractional(const std::vector<double>& x, const std::vector<int>& cols) const {
        int best = -1;
        double best_dist = 0.0;
        std::uint64_t best_key = 0;
        for (int j : cols) {
            const double v = x[static_cast<std::size_t>(j)];
            const double frac = v - std::floor(v);
            if (frac <= kIntTol || frac >= 1.0 - kIntTol) continue;
            const double dist = std::fabs(frac - 0.5);
            const std::uint64_t key = params_.seed ? splitmix(params_.seed ^ static_cast<std::uint64_t>(j)) : 0;
            if (best < 0 || dist < best_dist - 1e-12 ||
                (dist <= best_dist + 1e-12 && params_.seed && key < best_key)) {
                best = j;
                best_dist = dist;
                best_key = key;
            }
        }
        return best;
    }

    void set_incumbent(const std::vector<double>& values, double obj) {
        incumbent_ = true;
        incumbent_obj_ = obj;
        incumbent_values_ = values;
        for (int j : binaries_) {
            auto& v = incumbent_values_[static_cast<std::size_t>(j)];
            v = std::round(v);
        }
    }

    // Fixes every binary to the rounded values and solves the remaining LP.
    std::optional<LpResult> solve_with_binaries(const std::vector<double>& rounded) {
        lp_.reset_bounds();
        for (int j : binaries_) {
            const double v = rounded[static_cast<std::size_t>(j)];
            if (v < lp_.lower(j) - kIntTol || v > lp_.upper(j) + kIntTol) return std::nullopt;
            lp_.set_bounds(j, v, v);
        }
        auto res = solve_node(root_basis_.get());
        if (res.status != LpStatus::optimal) return std::nullopt;
        return res;
    }

    // Rounds the root commitments two ways (nearest, and up); the transition
    // binaries then follow from the dispatch LP with commitments fixed.
    void rounding_heuristic(const std::vector<double>& root, SolveStats& st) {
        const auto& u_cols = commit_;
        if (u_cols.empty()) return;

        for (int variant = 0; variant < 2; ++variant) {
            if (deadline_ && Clock::now() > *deadline_) return;
            lp_.reset_bounds();
            bool ok = true;
            for (int j : u_cols) {
                const double v = root[static_cast<std::size_t>(j)];
                const double r = variant == 0 ? std::round(v) : (v > kIntTol ? 1.0 : 0.0);
                if (r < lp_.lower(j) - kIntTol || r > lp_.upper(j) + kIntTol) {
                    ok = false;
                    break;
                }
                lp_.set_bounds(j, r, r);
            }
            if (!ok) continue;
            LpResult partial = solve_node(root_basis_.get());
            st.simplex_iters += partial.iterations;
            if (partial.status != LpStatus::optimal) continue;
            std::vector<double> rounded = partial.values;
            for (int j : binaries_) rounded[static_cast<std::size_t>(j)] = std::round(rounded[static_cast<std::size_t>(j)]);
            auto full = solve_with_binaries(rounded);
            if (!full) continue;
            st.simplex_iters += full->iterations;
            if (!incumbent_ || full->objective < incumbent_obj_ - prune_eps()) set_incumbent(full->values, full->objective);
        }
        lp_.reset_bounds();
    }

    const MilpProblem& prob_;
    MilpParams params_;
    SimplexSolver lp_;
    std::vector<int> binaries_;
    std::vector<int> commit_;
    std::optional<Clock::time_point> deadline_;
    std::shared_ptr<const Basis> root_basis_;
    std::unordered_set<int> touched_;
    long next_id_ = 0;

    bool incumbent_ = false;
    double incumbent_obj_ = std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_values_;
};

}  // namespace

MilpResult solve_milp(const MilpProblem& prob, const MilpParams& params) {
    if (!(params.gap_tol >= 0.0)) throw SemanticError("gap_tol must be non-negative");
    BranchAndBound bb(prob, params);
    return bb.run();
}

MilpResult warm_restricted_solve(const MilpProblem& prob, const FreezeMask& mask, const MilpParams& params) {
    return solve_milp(fix_commitments(prob, mask), params);
}

LpResult solve_fixed_binaries(const MilpProblem& prob, const std::vector<double>& binaries) {
    if (binaries.size() != prob.columns.size())
        throw DimensionError("solve_fixed_binaries: expected one value per column");
    SimplexSolver lp(prob);
    for (std::size_t j = 0; j < prob.columns.size(); ++j) {
        if (!prob.columns[j].integer) continue;
        const double v = std::round(binaries[j]);
        lp.set_bounds(static_cast<int>(j), v, v);
    }
    return lp.solve();
}

}  // namespace ucr
