#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "provi/value.hpp"

namespace provi {

/// Ordered finite map from address names to ground values. Insertion order
/// is preserved (it records execution order), but equality is order-free
/// map equality. Immutable after construction; updates return copies.
class Trace {
  public:
    using Entry = std::pair<std::string, GroundValue>;

    Trace() = default;

    static Trace single(std::string name, GroundValue v) {
        Trace t;
        t.entries_.emplace_back(std::move(name), std::move(v));
        return t;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    bool contains(std::string_view name) const { return find(name) != nullptr; }
    const GroundValue* find(std::string_view name) const;

    /// Copy with (name, v) appended; throws on an existing name.
    Trace with(std::string name, GroundValue v) const;

    /// Order-insensitive map equality over same_value.
    bool same_mapping(const Trace& o) const;

    std::string describe() const;

  private:
    std::vector<Entry> entries_;
};

struct PopResult {
    GroundValue value;
    double weight = 0.0;  // 1 on hit, 0 on miss/type mismatch
    Trace rest;
};

/// Looks up `name` at the expected ground type. On a hit returns the value,
/// weight 1 and the trace without that entry; on a miss (or wrong type) the
/// type default, weight 0 and the empty trace. Total by construction.
PopResult trace_pop(const Trace& u, std::string_view name, GroundType expected);

/// Concatenation of traces with disjoint names; throws DisjointnessViolation
/// naming the first clash otherwise.
Trace trace_concat(const Trace& a, const Trace& b);

/// Splits u into (entries named in `consumed`, the rest). Names absent from
/// u are ignored.
std::pair<Trace, Trace> trace_subtrace_remainder(const Trace& u,
                                                 const std::set<std::string>& consumed);

/// JSON object {name: encoded value}, insertion-ordered. Reals encode as
/// {"t":"real","v":...,"smooth":bool}; tangents are not serialized.
std::string trace_to_json(const Trace& u);
Trace trace_from_json(const std::string& text);

}  // namespace provi
