#include "ucr/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ucr {

namespace {

constexpr int kUnknown = -1;

// Relative slack so that demand equal to capability is never rejected.
bool exceeds(double need, double have) { return need > have + 1e-9 * std::max(1.0, std::fabs(have)); }

std::string fmt_mw(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v << " MW";
    return os.str();
}

// state[g][t] for t = 0..T: 0/1 when frozen (hour 0 is the initial status),
// kUnknown otherwise.
std::vector<std::vector<int>> frozen_states(const UcInstance& inst, const FreezeMask& mask) {
    const int T = inst.horizon;
    std::vector<std::vector<int>> s(inst.generators.size(), std::vector<int>(static_cast<std::size_t>(T) + 1, kUnknown));
    for (std::size_t g = 0; g < inst.generators.size(); ++g) s[g][0] = inst.generators[g].u0;
    for (const auto& e : mask.entries()) {
        const auto g = inst.generator_index(e.g);
        if (g && e.t >= 1 && e.t <= T) s[*g][static_cast<std::size_t>(e.t)] = e.u;
    }
    return s;
}

void check_capacity(const UcInstance& inst, const std::vector<std::vector<int>>& s, ScreenReport& rep) {
    for (int t = 1; t <= inst.horizon; ++t) {
        double cap = 0.0;
        for (std::size_t g = 0; g < inst.generators.size(); ++g)
            if (s[g][static_cast<std::size_t>(t)] != 0) cap += inst.generators[g].p_max;
        const double d = inst.total_demand(t);
        if (exceeds(d, cap))
            rep.reasons.push_back({"capacity", t, "", "demand " + fmt_mw(d) + " exceeds unfrozen capacity " + fmt_mw(cap)});
    }
}

void check_logic(const UcInstance& inst, const std::vector<std::vector<int>>& s, ScreenReport& rep) {
    const int T = inst.horizon;
    for (std::size_t gi = 0; gi < inst.generators.size(); ++gi) {
        const auto& gen = inst.generators[gi];
        const auto& st = s[gi];
        const int forced = gen.u0 == 1 ? std::max(0, gen.ut - gen.init_duration) : std::max(0, gen.dt - gen.init_duration);
        for (int t = 1; t <= std::min(forced, T); ++t) {
            if (st[static_cast<std::size_t>(t)] == 1 - gen.u0)
                rep.reasons.push_back({"logic", t, gen.id,
                                       std::string("frozen ") + (gen.u0 ? "off" : "on") + " inside the initial " +
                                           (gen.u0 ? "minimum up" : "minimum down") + " window of " +
                                           std::to_string(forced) + " h"});
        }
        // `last[v]` is the latest hour before t known to be in state v, or -1.
        int last[2] = {-1, -1};
        last[gen.u0] = 0;
        for (int t = 1; t <= T; ++t) {
            const int v = st[static_cast<std::size_t>(t)];
            if (v == kUnknown) continue;
            const int other = 1 - v;
            if (last[other] >= 0) {
                // A transition into v happened in (last[other], t]; v must then
                // persist through last[other] + (UT or DT).
                const int hold = v == 1 ? gen.ut : gen.dt;
                const int until = std::min(T, last[other] + hold);
                for (int t2 = t + 1; t2 <= until; ++t2) {
                    if (st[static_cast<std::size_t>(t2)] == other) {
                        rep.reasons.push_back(
                            {"logic", t2, gen.id,
                             std::string(v == 1 ? "start" : "shutdown") + " implied by hour " + std::to_string(t) +
                                 " requires " + (v == 1 ? "on" : "off") + " through hour " + std::to_string(until)});
                        break;
                    }
                }
            }
            last[v] = t;
        }
    }
}

// Bounds on one unit's output change from t-1 to t given frozen states
// (kUnknown where free). Valid for every integer-feasible point.
double max_increase(const Generator& gen, int prev, int cur, int t) {
    if (cur == 0) return 0.0;
    const double base = t == 1 ? gen.p0 : (prev == 1 ? gen.p_min : 0.0);
    if (prev == 1) return std::max(0.0, std::min(gen.r_hr, gen.p_max - base));
    if (prev == 0) return std::min(gen.r_su, gen.p_max);
    return std::min(std::max(gen.r_hr, gen.r_su), gen.p_max);
}

double max_decrease(const Generator& gen, int prev, int cur, int t) {
    if (prev == 0) return 0.0;
    const double top = t == 1 ? gen.p0 : gen.p_max;
    if (cur == 1) return std::max(0.0, std::min(gen.r_hr, top - gen.p_min));
    if (cur == 0) return std::min(gen.r_sd, top);
    return std::min(std::max(gen.r_hr, gen.r_sd), top);
}

void check_ramp(const UcInstance& inst, const std::vector<std::vector<int>>& s, const FreezeMask& mask,
                ScreenReport& rep) {
    std::set<int> hours;
    for (const auto& e : mask.entries()) {
        hours.insert(e.t);
        if (e.t < inst.horizon) hours.insert(e.t + 1);
    }
    for (int t : hours) {
        if (t < 1 || t > inst.horizon) continue;
        const double prev_d = t == 1 ? [&] {
            double p = 0.0;
            for (const auto& g : inst.generators) p += g.p0;
            return p;
        }()
                                     : inst.total_demand(t - 1);
        const double d = inst.total_demand(t);
        double up = 0.0, down = 0.0;
        for (std::size_t g = 0; g < inst.generators.size(); ++g) {
            const int a = s[g][static_cast<std::size_t>(t - 1)];
            const int b = s[g][static_cast<std::size_t>(t)];
            up += max_increase(inst.generators[g], a, b, t);
            down += max_decrease(inst.generators[g], a, b, t);
        }
        if (exceeds(d - prev_d, up))
            rep.reasons.push_back({"ramp", t, "", "load rise " + fmt_mw(d - prev_d) + " exceeds ramp-up capability " + fmt_mw(up)});
        if (exceeds(prev_d - d, down))
            rep.reasons.push_back(
                {"ramp", t, "", "load drop " + fmt_mw(prev_d - d) + " exceeds ramp-down capability " + fmt_mw(down)});
    }
}

}  // namespace

std::string ScreenReport::summary(std::size_t max_items) const {
    if (reasons.empty()) return "accepted";
    std::ostringstream os;
    os << "rejected, " << reasons.size() << " failed check(s):";
    for (std::size_t i = 0; i < std::min(max_items, reasons.size()); ++i) {
        const auto& r = reasons[i];
        os << "\n  " << r.check << " at t=" << r.t;
        if (!r.g.empty()) os << ", " << r.g;
        os << ": " << r.detail;
    }
    if (reasons.size() > max_items) os << "\n  ...";
    return os.str();
}

ScreenReport screen_mask(const UcInstance& inst, const FreezeMask& mask) {
    mask.check_bound(inst);
    const auto s = frozen_states(inst, mask);
    ScreenReport rep;
    check_capacity(inst, s, rep);
    check_logic(inst, s, rep);
    check_ramp(inst, s, mask, rep);
    return rep;
}

Feedback screen_feedback(const FreezeMask& mask, const ScreenReport& report) {
    Feedback fb;
    fb.summary = report.summary();
    std::set<std::pair<int, std::string>> cells;
    for (const auto& r : report.reasons) {
        for (const auto& e : mask.entries()) {
            bool hit = false;
            if (r.check == "capacity") hit = e.t == r.t && e.u == 0;
            else if (r.check == "logic") hit = e.g == r.g;
            else if (r.check == "ramp") hit = e.t == r.t || e.t == r.t - 1;
            if (hit) cells.insert({e.t, e.g});
        }
    }
    fb.cells.assign(cells.begin(), cells.end());
    return fb;
}

}  // namespace ucr
