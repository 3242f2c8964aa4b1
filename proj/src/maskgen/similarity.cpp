#include "ucr/error.hpp"
#include "ucr/kernels.hpp"
#include "ucr/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace ucr {

std::vector<std::size_t> nearest_days(const UcInstance& inst, const HistoryBank& history, std::size_t count) {
    history.check_shape(inst.generators.size(), inst.horizon);
    const auto target = inst.total_demand_profile();
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i)
        dist.emplace_back(load_distance(target, history.days[i].demand), i);
    std::sort(dist.begin(), dist.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(count, dist.size()); ++i) out.push_back(dist[i].second);
    return out;
}

FreezeMask consensus_mask(const UcInstance& inst, const HistoryBank& history, const std::vector<std::size_t>& days,
                          int k_cap) {
    if (k_cap < 0) throw SemanticError("k_cap must be >= 0");
    if (days.empty()) return FreezeMask({}, k_cap);
    const std::size_t G = inst.generators.size();
    std::vector<std::size_t> order(G);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ga = inst.generators[a];
        const auto& gb = inst.generators[b];
        if (ga.p_max != gb.p_max) return ga.p_max > gb.p_max;
        return ga.id < gb.id;
    });
    std::vector<MaskEntry> entries;
    for (int t = 1; t <= inst.horizon; ++t) {
        int kept = 0;
        for (std::size_t g : order) {
            if (kept >= k_cap) break;
            const int v = history.days[days.front()].schedule.u[g][static_cast<std::size_t>(t - 1)];
            const bool unanimous = std::all_of(days.begin(), days.end(), [&](std::size_t d) {
                return history.days[d].schedule.u[g][static_cast<std::size_t>(t - 1)] == v;
            });
            if (!unanimous) continue;
            entries.push_back({t, inst.generators[g].id, v});
            ++kept;
        }
    }
    return FreezeMask(std::move(entries), k_cap);
}

FreezeMask stability_mask(const UcInstance& inst, const HistoryBank& history, int H, int k_cap) {
    if (history.empty()) throw SemanticError("stability mask needs a non-empty history");
    if (H < 1) throw SemanticError("stability mask needs H >= 1");
    return consensus_mask(inst, history, nearest_days(inst, history, static_cast<std::size_t>(H)), k_cap);
}

FreezeMask knn_mask(const UcInstance& inst, const HistoryBank& history, int k_neighbors, int k_cap) {
    if (k_neighbors < 1) throw SemanticError("knn mask needs k_neighbors >= 1");
    if (history.size() < static_cast<std::size_t>(k_neighbors))
        throw SemanticError("knn mask needs at least k_neighbors = " + std::to_string(k_neighbors) +
                            " history days, got " + std::to_string(history.size()));
    return consensus_mask(inst, history, nearest_days(inst, history, static_cast<std::size_t>(k_neighbors)), k_cap);
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed) {
    const auto n = points.size();
    if (k < 1 || n < static_cast<std::size_t>(k)) throw SemanticError("kmeans needs 1 <= k <= number of points");
    auto sq = [](const std::vector<double>& a, const std::vector<double>& b) { return kernels::squared_distance(a, b); };

    std::mt19937_64 rng(seed);
    KMeansResult res;
    auto& c = res.centroids;
    c.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n);
    while (c.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& ci : c) best = std::min(best, sq(points[i], ci));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick + 1 < n; ++pick) {
                if (r < d2[pick]) break;
                r -= d2[pick];
            }
        }
        c.push_back(points[pick]);
    }

    res.labels.assign(n, -1);
    const std::size_t dim = points.front().size();
    for (res.iterations = 1; res.iterations <= 100; ++res.iterations) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = sq(points[i], c[0]);
            for (int j = 1; j < k; ++j) {
                const double d = sq(points[i], c[static_cast<std::size_t>(j)]);
                if (d < bd) {
                    bd = d;
                    best = j;
                }
            }
            if (res.labels[i] != best) {
                res.labels[i] = best;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sum(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto l = static_cast<std::size_t>(res.labels[i]);
            ++count[l];
            kernels::axpy(1.0, points[i], sum[l]);
        }
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
            if (count[j] > 0) {
                for (auto& v : sum[j]) v /= count[j];
                c[j] = std::move(sum[j]);
                continue;
            }
            // Empty cluster: move it onto the point farthest from its centroid.
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = sq(points[i], c[static_cast<std::size_t>(res.labels[i])]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            c[j] = points[far];
            res.labels[far] = static_cast<int>(j);
            changed = true;
        }
        if (!changed) break;
    }
    res.iterations = std::min(res.iterations, 100);
    return res;
}

FreezeMask kmeans_mask(const UcInstance& inst, const HistoryBank& history, int n_clusters, int k_cap,
                       std::uint64_t seed) {
    if (history.empty()) throw SemanticError("kmeans mask needs a non-empty history");
    history.check_shape(inst.generators.size(), inst.horizon);
    const int k = n_clusters > 0 ? n_clusters
                                 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(history.size())) - 1e-12));
    if (static_cast<std::size_t>(k) > history.size())
        throw SemanticError("kmeans mask needs n_clusters <= history size");
    std::vector<std::vector<double>> points;
    for (const auto& d : history.days) points.push_back(d.demand);
    const auto km = kmeans(points, k, seed);

    const auto target = inst.total_demand_profile();
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < km.centroids.size(); ++j) {
        const double d = kernels::squared_distance(target, km.centroids[j]);
        if (d < bd) {
            bd = d;
            best = j;
        }
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (km.labels[i] == static_cast<int>(best)) members.push_back(i);
    return consensus_mask(inst, history, members, k_cap);
}

}  // namespace ucr
