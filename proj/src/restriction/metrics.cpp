#include "ucr/restriction.hpp"

#include "ucr/error.hpp"

#include <algorithm>

namespace ucr {

ReductionMetrics reduction_metrics(const MilpProblem& prob, const FreezeMask& mask) {
    const std::size_t n = prob.columns.size();
    std::vector<char> fixed(n, 0);       // fixed after applying the mask
    std::vector<char> newly(n, 0);       // fixed by the mask, not by the base problem
    for (std::size_t j = 0; j < n; ++j) fixed[j] = prob.columns[j].lower == prob.columns[j].upper;

    const int G = static_cast<int>(prob.generator_ids.size());
    const int T = prob.horizon;
    // Commitment known per (g, t); hour 0 is always known.
    std::vector<std::vector<char>> known(static_cast<std::size_t>(G), std::vector<char>(static_cast<std::size_t>(T) + 1, 0));
    for (int g = 0; g < G; ++g) {
        known[g][0] = 1;
        for (int t = 1; t <= T; ++t) {
            const auto j = prob.find({VarKind::U, g, t});
            if (j && fixed[static_cast<std::size_t>(*j)]) known[g][t] = 1;
        }
    }
    for (const auto& e : mask.entries()) {
        const auto it = std::find(prob.generator_ids.begin(), prob.generator_ids.end(), e.g);
        if (it == prob.generator_ids.end() || e.t < 1 || e.t > T)
            throw SemanticError("reduction_metrics: mask entry outside the problem");
        const int g = static_cast<int>(it - prob.generator_ids.begin());
        const auto j = static_cast<std::size_t>(prob.index({VarKind::U, g, e.t}));
        if (!fixed[j]) newly[j] = 1;
        fixed[j] = 1;
        known[g][e.t] = 1;
    }
    // Logic rows pin V and W once both adjacent commitments are known.
    for (int g = 0; g < G; ++g) {
        for (int t = 1; t <= T; ++t) {
            if (!known[g][t] || !known[g][t - 1]) continue;
            for (VarKind k : {VarKind::V, VarKind::W}) {
                const auto j = static_cast<std::size_t>(prob.index({k, g, t}));
                if (!fixed[j]) newly[j] = 1;
                fixed[j] = 1;
            }
        }
    }

    std::size_t binaries = 0, newly_fixed = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!prob.columns[j].integer) continue;
        ++binaries;
        newly_fixed += newly[j];
    }
    std::size_t rows_fixed = 0;
    for (const auto& row : prob.rows) {
        bool all = !row.index.empty(), any_new = false;
        for (int j : row.index) {
            all = all && fixed[static_cast<std::size_t>(j)];
            any_new = any_new || newly[static_cast<std::size_t>(j)];
        }
        rows_fixed += all && any_new;
    }
    ReductionMetrics m;
    if (binaries) m.variable_pct = 100.0 * static_cast<double>(newly_fixed) / static_cast<double>(binaries);
    if (!prob.rows.empty()) m.constraint_pct = 100.0 * static_cast<double>(rows_fixed) / static_cast<double>(prob.rows.size());
    return m;
}

}  // namespace ucr
