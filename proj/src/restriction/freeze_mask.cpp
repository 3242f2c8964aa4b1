#include "ucr/freeze_mask.hpp"

#include "ucr/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace ucr {

namespace {

std::string describe(const MaskEntry& e) {
    return "(" + std::to_string(e.t) + ", " + e.g + ", " + std::to_string(e.u) + ")";
}

}  // namespace

FreezeMask::FreezeMask(std::vector<MaskEntry> entries, int k_cap) : entries_(std::move(entries)), k_cap_(k_cap) {
    if (k_cap_ < 0) throw SemanticError("freeze mask: k_cap must be >= 0");
    std::sort(entries_.begin(), entries_.end(),
              [](const MaskEntry& a, const MaskEntry& b) { return std::tie(a.t, a.g) < std::tie(b.t, b.g); });
    std::map<int, int> per_hour;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.t < 1) throw SemanticError("freeze mask: hour out of range in " + describe(e));
        if (e.u != 0 && e.u != 1) throw SemanticError("freeze mask: state not in {0,1} in " + describe(e));
        if (i > 0 && entries_[i - 1].t == e.t && entries_[i - 1].g == e.g)
            throw SemanticError("freeze mask: duplicate (t, g) pair in " + describe(e));
        if (++per_hour[e.t] > k_cap_)
            throw SemanticError("freeze mask: hour " + std::to_string(e.t) + " exceeds the per-hour cap K = " +
                                std::to_string(k_cap_));
    }
}

int FreezeMask::count_at(int t) const {
    return static_cast<int>(std::count_if(entries_.begin(), entries_.end(), [t](const MaskEntry& e) { return e.t == t; }));
}

const MaskEntry* FreezeMask::find(int t, std::string_view g) const {
    for (const auto& e : entries_)
        if (e.t == t && e.g == g) return &e;
    return nullptr;
}

void FreezeMask::check_bound(const UcInstance& inst) const {
    for (const auto& e : entries_) {
        if (e.t < 1 || e.t > inst.horizon)
            throw SemanticError("freeze mask: hour out of [1, " + std::to_string(inst.horizon) + "] in " + describe(e));
        if (!inst.generator_index(e.g)) throw SemanticError("freeze mask: unknown generator in " + describe(e));
    }
}

FreezeMask FreezeMask::without(const std::vector<std::pair<int, std::string>>& cells) const {
    std::vector<MaskEntry> kept;
    for (const auto& e : entries_) {
        const bool drop = std::any_of(cells.begin(), cells.end(),
                                      [&](const auto& c) { return c.first == e.t && c.second == e.g; });
        if (!drop) kept.push_back(e);
    }
    return FreezeMask(std::move(kept), k_cap_);
}

int default_k_cap(std::size_t num_generators) {
    return static_cast<int>(std::ceil(0.1 * static_cast<double>(num_generators) - 1e-12));
}

std::string mask_to_json(const FreezeMask& mask) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : mask.entries()) arr.push_back(nlohmann::json::array({e.t, e.g, e.u}));
    return arr.dump();
}

FreezeMask parse_mask_tuples(std::string_view text, const UcInstance& inst, int k_cap) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("mask: not a JSON document (") + e.what() + ")");
    }
    if (!doc.is_array()) throw SchemaError("mask: top level must be a JSON array of [t, g, u] tuples");

    std::vector<MaskEntry> entries;
    entries.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& el = doc[i];
        const std::string where = "mask[" + std::to_string(i) + "]";
        if (!el.is_array() || el.size() != 3) throw SchemaError(where + ": expected a 3-element array [t, g, u]");
        if (!el[0].is_number_integer()) throw SchemaError(where + ": t must be an integer");
        if (!el[1].is_string()) throw SchemaError(where + ": g must be a generator id string");
        if (!el[2].is_number_integer()) throw SchemaError(where + ": u must be an integer");
        const auto t = el[0].get<long long>();
        const auto u = el[2].get<long long>();
        const auto g = el[1].get<std::string>();
        if (t < 1 || t > inst.horizon)
            throw SemanticError(where + ": hour " + std::to_string(t) + " outside [1, " + std::to_string(inst.horizon) + "]");
        if (u != 0 && u != 1) throw SemanticError(where + ": state " + std::to_string(u) + " not in {0,1}");
        if (!inst.generator_index(g)) throw SemanticError(where + ": unknown generator '" + g + "'");
        entries.push_back({static_cast<int>(t), g, static_cast<int>(u)});
    }
    return FreezeMask(std::move(entries), k_cap);
}

}  // namespace ucr
