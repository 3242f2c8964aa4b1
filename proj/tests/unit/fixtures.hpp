#pragma once

#include "ucr/instance.hpp"

#include <string>
#include <vector>

namespace ucr::fixtures {

inline Generator unit(std::string id, double p_min, double p_max, double c, int u0 = 0) {
    Generator g;
    g.id = std::move(id);
    g.bus = "b1";
    g.c = c;
    g.c_nl = 5.0;
    g.c_su = 20.0;
    g.p_min = p_min;
    g.p_max = p_max;
    g.r_hr = p_max;
    g.r_su = p_max;
    g.r_sd = p_max;
    g.u0 = u0;
    g.p0 = u0 ? p_min : 0.0;
    return g;
}

/// One bus, no lines, demand[t] on b1.
inline UcInstance single_bus(std::vector<Generator> gens, std::vector<double> demand) {
    UcInstance inst;
    inst.buses = {"b1"};
    inst.ref_bus = "b1";
    inst.generators = std::move(gens);
    inst.horizon = static_cast<int>(demand.size());
    inst.demand = {std::move(demand)};
    return inst;
}

inline std::string data_path(const std::string& name) { return std::string(UCR_DATA_DIR) + "/" + name; }

}  // namespace ucr::fixtures
