#include "ucr/error.hpp"
#include "ucr/maskgen.hpp"

#include <cmath>
#include <random>

namespace ucr {

namespace {

struct Cell {
    int t;
    std::size_t g;
};

// Draws ⌊ratio·G·T⌋ distinct cells uniformly, rejecting draws that would
// exceed ⌈ratio·G⌉ cells in one hour.
std::vector<Cell> sample_cells(const UcInstance& inst, double ratio, std::mt19937_64& rng, int& cap) {
    if (!(ratio >= 0.0 && ratio <= 1.0)) throw SemanticError("ratio must lie in [0, 1]");
    const std::size_t G = inst.generators.size();
    const int T = inst.horizon;
    cap = static_cast<int>(std::ceil(ratio * static_cast<double>(G) - 1e-9));
    const auto total = static_cast<std::size_t>(G) * static_cast<std::size_t>(T);
    auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total) + 1e-9));
    count = std::min(count, static_cast<std::size_t>(cap) * static_cast<std::size_t>(T));

    std::vector<char> taken(total, 0);
    std::vector<int> per_hour(static_cast<std::size_t>(T), 0);
    std::vector<Cell> cells;
    std::uniform_int_distribution<std::size_t> pick(0, total == 0 ? 0 : total - 1);
    while (cells.size() < count) {
        const std::size_t k = pick(rng);
        const int t = static_cast<int>(k / G);
        if (taken[k] || per_hour[static_cast<std::size_t>(t)] >= cap) continue;
        taken[k] = 1;
        ++per_hour[static_cast<std::size_t>(t)];
        cells.push_back({t + 1, k % G});
    }
    return cells;
}

}  // namespace

FreezeMask random_mask(const UcInstance& inst, double ratio, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int cap = 0;
    const auto cells = sample_cells(inst, ratio, rng, cap);
    std::bernoulli_distribution coin(0.5);
    std::vector<MaskEntry> entries;
    for (const auto& c : cells) entries.push_back({c.t, inst.generators[c.g].id, coin(rng) ? 1 : 0});
    return FreezeMask(std::move(entries), cap);
}

FreezeMask fix_at_optimum_mask(const UcInstance& inst, const DailySchedule& optimum, double ratio,
                               std::uint64_t seed) {
    optimum.check(inst.generators.size(), inst.horizon);
    std::mt19937_64 rng(seed);
    int cap = 0;
    const auto cells = sample_cells(inst, ratio, rng, cap);
    std::vector<MaskEntry> entries;
    for (const auto& c : cells)
        entries.push_back({c.t, inst.generators[c.g].id, optimum.u[c.g][static_cast<std::size_t>(c.t - 1)]});
    return FreezeMask(std::move(entries), cap);
}

}  // namespace ucr
