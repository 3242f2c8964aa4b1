#pragma once

#include "ucr/instance.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ucr {

/// One fixing u(g, t) = value, hour 1-based.
struct MaskEntry {
    int t = 1;
    std::string g;
    int u = 0;

    bool operator==(const MaskEntry&) const = default;
};

/// Sparse set of commitment fixings with a per-hour cap. Construction
/// enforces the cap and rejects duplicate (t, g) pairs, so every FreezeMask
/// value in the program is well formed. Entries are kept sorted by (t, g).
class FreezeMask {
public:
    FreezeMask() = default;

    /// Throws SemanticError on duplicates, a cap violation, u not in {0,1},
    /// t < 1 or k_cap < 0.
    FreezeMask(std::vector<MaskEntry> entries, int k_cap);

    const std::vector<MaskEntry>& entries() const { return entries_; }
    int k_cap() const { return k_cap_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Number of entries at hour t.
    int count_at(int t) const;
    const MaskEntry* find(int t, std::string_view g) const;

    /// Throws SemanticError naming the tuple if an hour or generator is not
    /// part of `inst`.
    void check_bound(const UcInstance& inst) const;

    /// Copy without the listed (t, g) cells.
    FreezeMask without(const std::vector<std::pair<int, std::string>>& cells) const;

    bool operator==(const FreezeMask&) const = default;

private:
    std::vector<MaskEntry> entries_;
    int k_cap_ = 0;
};

/// ⌈0.1·|G|⌉
int default_k_cap(std::size_t num_generators);

/// `[[t,"g",u],...]`, hours 1-based.
std::string mask_to_json(const FreezeMask& mask);

/// Strict parser for the tuple schema. Accepts only a JSON array of
/// 3-element arrays [t, g, u] with integer t in [1, T], a known generator id
/// and u in {0, 1}.
///   ParseError    - not JSON (including prose around the array)
///   SchemaError   - JSON but not an array of [int, string, int] triples
///   SemanticError - unknown generator, t/u out of range, duplicate (t, g),
///                   per-hour cap exceeded
FreezeMask parse_mask_tuples(std::string_view text, const UcInstance& inst, int k_cap);

}  // namespace ucr
