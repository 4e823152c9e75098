#include "provi/trace.hpp"

#include <json.hpp>

namespace provi {

const GroundValue* Trace::find(std::string_view name) const {
    for (const auto& [k, v] : entries_)
        if (k == name) return &v;
    return nullptr;
}

Trace Trace::with(std::string name, GroundValue v) const {
    if (contains(name)) throw DisjointnessViolation(name);
    Trace t(*this);
    t.entries_.emplace_back(std::move(name), std::move(v));
    return t;
}

bool Trace::same_mapping(const Trace& o) const {
    if (size() != o.size()) return false;
    for (const auto& [k, v] : entries_) {
        const GroundValue* w = o.find(k);
        if (w == nullptr || !v.same_value(*w)) return false;
    }
    return true;
}

std::string Trace::describe() const {
    std::string s = "{";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) s += ", ";
        s += entries_[i].first + ": " + entries_[i].second.describe();
    }
    return s + "}";
}

PopResult trace_pop(const Trace& u, std::string_view name, GroundType expected) {
    const GroundValue* v = u.find(name);
    if (v == nullptr || v->type() != expected)
        return PopResult{default_value(expected), 0.0, Trace{}};
    Trace rest;
    for (const auto& [k, w] : u.entries())
        if (k != name) rest = rest.with(k, w);
    return PopResult{*v, 1.0, std::move(rest)};
}

Trace trace_concat(const Trace& a, const Trace& b) {
    Trace t = a;
    for (const auto& [k, v] : b.entries()) t = t.with(k, v);  // throws on clash
    return t;
}

std::pair<Trace, Trace> trace_subtrace_remainder(const Trace& u,
                                                 const std::set<std::string>& consumed) {
    Trace in, out;
    for (const auto& [k, v] : u.entries()) {
        if (consumed.count(k))
            in = in.with(k, v);
        else
            out = out.with(k, v);
    }
    return {std::move(in), std::move(out)};
}

namespace {

using json = nlohmann::ordered_json;

json value_to_json(const GroundValue& v) {
    switch (v.type()) {
        case GroundType::Unit: return json{{"t", "unit"}};
        case GroundType::Bool: return json{{"t", "bool"}, {"v", v.as_bool()}};
        case GroundType::Int: return json{{"t", "int"}, {"v", v.as_int()}};
        case GroundType::Str: return json{{"t", "str"}, {"v", v.as_str()}};
        case GroundType::Real:
            return json{{"t", "real"},
                        {"v", v.as_real().d.val},
                        {"smooth", v.as_real().smooth == Smoothness::Smooth}};
        case GroundType::Tuple: {
            json arr = json::array();
            for (const auto& e : v.as_tuple()) arr.push_back(value_to_json(e));
            return json{{"t", "tuple"}, {"v", std::move(arr)}};
        }
    }
    return json{{"t", "unit"}};
}

GroundValue value_from_json(const json& j) {
    const std::string t = j.at("t").get<std::string>();
    if (t == "unit") return GroundValue::unit();
    if (t == "bool") return GroundValue::boolean(j.at("v").get<bool>());
    if (t == "int") return GroundValue::integer(j.at("v").get<std::int64_t>());
    if (t == "str") return GroundValue::str(j.at("v").get<std::string>());
    if (t == "real")
        return GroundValue::real(j.at("v").get<double>(),
                                 j.value("smooth", false) ? Smoothness::Smooth : Smoothness::Star);
    if (t == "tuple") {
        GroundValue::Tuple tup;
        for (const auto& e : j.at("v")) tup.push_back(value_from_json(e));
        return GroundValue::tuple(std::move(tup));
    }
    throw TypeError("unknown value tag '" + t + "'");
}

}  // namespace

std::string trace_to_json(const Trace& u) {
    json obj = json::object();
    for (const auto& [k, v] : u.entries()) obj[k] = value_to_json(v);
    return obj.dump();
}

Trace trace_from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw TypeError(std::string("trace is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw TypeError("trace JSON must be an object");
    Trace t;
    for (const auto& [k, v] : obj.items()) t = t.with(k, value_from_json(v));
    return t;
}

}  // namespace provi
