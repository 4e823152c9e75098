#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "provi/dual.hpp"
#include "provi/errors.hpp"

namespace provi {

/// How a real may be consumed downstream. Smooth reals must only flow into
/// differentiable operations; Star reals may be used in any measurable way.
enum class Smoothness { Smooth, Star };

/// Tagged real. `origin` names the sample (or parameter) that produced a
/// Smooth value, for diagnostics when it reaches a non-smooth consumer.
struct RealValue {
    Dual d{};
    Smoothness smooth = Smoothness::Star;
    std::string origin;
};

inline RealValue smooth_real(Dual d, std::string origin = {}) {
    return RealValue{d, Smoothness::Smooth, std::move(origin)};
}
inline RealValue star_real(double v) { return RealValue{make_dual(v), Smoothness::Star, {}}; }

struct Unit {
    bool operator==(const Unit&) const = default;
};

enum class GroundType { Unit, Bool, Int, Str, Real, Tuple };

const char* to_string(GroundType t);

/// Tag attached to each ground type: discrete types accumulate densities
/// against counting, reals against Lebesgue.
enum class BaseMeasureKind { Counting, Lebesgue };

inline BaseMeasureKind base_measure_of(GroundType t) {
    return t == GroundType::Real ? BaseMeasureKind::Lebesgue : BaseMeasureKind::Counting;
}

/// Ground value: the data stored in traces and returned by programs.
class GroundValue {
  public:
    using Tuple = std::vector<GroundValue>;

    GroundValue() : v_(Unit{}) {}

    static GroundValue unit() { return GroundValue(); }
    static GroundValue boolean(bool b) { return GroundValue(Repr(b)); }
    static GroundValue integer(std::int64_t i) { return GroundValue(Repr(i)); }
    static GroundValue str(std::string s) { return GroundValue(Repr(std::move(s))); }
    static GroundValue real(RealValue r) { return GroundValue(Repr(std::move(r))); }
    static GroundValue real(double v, Smoothness s = Smoothness::Star, std::string origin = {}) {
        return real(RealValue{make_dual(v), s, std::move(origin)});
    }
    static GroundValue tuple(Tuple t) { return GroundValue(Repr(std::move(t))); }

    GroundType type() const { return static_cast<GroundType>(v_.index()); }

    bool as_bool() const { return get<bool>("Bool"); }
    std::int64_t as_int() const { return get<std::int64_t>("Int"); }
    const std::string& as_str() const { return get<std::string>("Str"); }
    const RealValue& as_real() const { return get<RealValue>("Real"); }
    const Tuple& as_tuple() const { return get<Tuple>("Tuple"); }

    /// Value equality: ignores tangents and provenance, compares the
    /// smoothness tag on reals.
    bool same_value(const GroundValue& o) const;

    std::string describe() const;

  private:
    using Repr = std::variant<Unit, bool, std::int64_t, std::string, RealValue, Tuple>;
    explicit GroundValue(Repr v) : v_(std::move(v)) {}

    template <class T>
    const T& get(const char* want) const {
        if (const T* p = std::get_if<T>(&v_)) return *p;
        throw TypeError(std::string("expected ") + want + ", got " + to_string(type()));
    }

    Repr v_;
};

/// Fixed per-type default, used when a pop misses. The real default is
/// Star-tagged so defaults never create smooth obligations.
GroundValue default_value(GroundType t);

// ---- smooth arithmetic on tagged reals ----------------------------------
// Any Smooth input makes the result Smooth (Star inputs promote); the
// result inherits the first smooth operand's origin.

RealValue rv_add(const RealValue& a, const RealValue& b);
RealValue rv_sub(const RealValue& a, const RealValue& b);
RealValue rv_mul(const RealValue& a, const RealValue& b);
RealValue rv_div(const RealValue& a, const RealValue& b);
RealValue rv_neg(const RealValue& a);
RealValue rv_sin(const RealValue& a);
RealValue rv_cos(const RealValue& a);
RealValue rv_exp(const RealValue& a);
RealValue rv_log(const RealValue& a);
RealValue rv_sqrt(const RealValue& a);

// ---- non-smooth consumers ------------------------------------------------

/// Throws SmoothnessViolation when a Smooth-tagged real reaches the named
/// non-smooth consumer; Star values (and non-reals) pass.
void check_nonsmooth_use(const GroundValue& v, std::string_view consumer);
void check_nonsmooth_use(const RealValue& v, std::string_view consumer);

/// True when the check above would throw.
bool violates_smoothness(const GroundValue& v, std::string_view consumer);

/// Comparison of reals; a non-smooth primitive, so both sides must be Star.
bool rv_less(const RealValue& a, const RealValue& b);

}  // namespace provi
