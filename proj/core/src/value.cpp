#include "provi/value.hpp"

#include <cmath>

namespace provi {

const char* to_string(GroundType t) {
    switch (t) {
        case GroundType::Unit: return "Unit";
        case GroundType::Bool: return "Bool";
        case GroundType::Int: return "Int";
        case GroundType::Str: return "Str";
        case GroundType::Real: return "Real";
        case GroundType::Tuple: return "Tuple";
    }
    return "?";
}

bool GroundValue::same_value(const GroundValue& o) const {
    if (type() != o.type()) return false;
    switch (type()) {
        case GroundType::Unit: return true;
        case GroundType::Bool: return as_bool() == o.as_bool();
        case GroundType::Int: return as_int() == o.as_int();
        case GroundType::Str: return as_str() == o.as_str();
        case GroundType::Real:
            return as_real().d.val == o.as_real().d.val && as_real().smooth == o.as_real().smooth;
        case GroundType::Tuple: {
            const auto& a = as_tuple();
            const auto& b = o.as_tuple();
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!a[i].same_value(b[i])) return false;
            return true;
        }
    }
    return false;
}

std::string GroundValue::describe() const {
    switch (type()) {
        case GroundType::Unit: return "()";
        case GroundType::Bool: return as_bool() ? "true" : "false";
        case GroundType::Int: return std::to_string(as_int());
        case GroundType::Str: return "\"" + as_str() + "\"";
        case GroundType::Real: {
            std::string s = std::to_string(as_real().d.val);
            if (as_real().smooth == Smoothness::Smooth) s += "s";
            return s;
        }
        case GroundType::Tuple: {
            std::string s = "(";
            const auto& t = as_tuple();
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (i) s += ", ";
                s += t[i].describe();
            }
            return s + ")";
        }
    }
    return "?";
}

GroundValue default_value(GroundType t) {
    switch (t) {
        case GroundType::Unit: return GroundValue::unit();
        case GroundType::Bool: return GroundValue::boolean(false);
        case GroundType::Int: return GroundValue::integer(0);
        case GroundType::Str: return GroundValue::str("");
        case GroundType::Real: return GroundValue::real(0.0, Smoothness::Star);
        case GroundType::Tuple: return GroundValue::tuple({});
    }
    return GroundValue::unit();
}

namespace {
RealValue combine(Dual d, const RealValue& a, const RealValue& b) {
    RealValue r;
    r.d = d;
    if (a.smooth == Smoothness::Smooth) {
        r.smooth = Smoothness::Smooth;
        r.origin = a.origin;
    } else if (b.smooth == Smoothness::Smooth) {
        r.smooth = Smoothness::Smooth;
        r.origin = b.origin;
    }
    return r;
}
RealValue lift(Dual d, const RealValue& a) { return RealValue{d, a.smooth, a.origin}; }
}  // namespace

RealValue rv_add(const RealValue& a, const RealValue& b) { return combine(a.d + b.d, a, b); }
RealValue rv_sub(const RealValue& a, const RealValue& b) { return combine(a.d - b.d, a, b); }
RealValue rv_mul(const RealValue& a, const RealValue& b) { return combine(a.d * b.d, a, b); }
RealValue rv_div(const RealValue& a, const RealValue& b) { return combine(a.d / b.d, a, b); }
RealValue rv_neg(const RealValue& a) { return lift(-a.d, a); }
RealValue rv_sin(const RealValue& a) { return lift(dsin(a.d), a); }
RealValue rv_cos(const RealValue& a) { return lift(dcos(a.d), a); }
RealValue rv_exp(const RealValue& a) { return lift(dexp(a.d), a); }
RealValue rv_log(const RealValue& a) { return lift(dlog(a.d), a); }
RealValue rv_sqrt(const RealValue& a) { return lift(dsqrt(a.d), a); }

void check_nonsmooth_use(const RealValue& v, std::string_view consumer) {
    if (v.smooth == Smoothness::Smooth)
        throw SmoothnessViolation(v.origin, std::string(consumer));
}

void check_nonsmooth_use(const GroundValue& v, std::string_view consumer) {
    if (v.type() == GroundType::Real) check_nonsmooth_use(v.as_real(), consumer);
}

bool violates_smoothness(const GroundValue& v, std::string_view consumer) {
    try {
        check_nonsmooth_use(v, consumer);
    } catch (const SmoothnessViolation&) {
        return true;
    }
    return false;
}

bool rv_less(const RealValue& a, const RealValue& b) {
    check_nonsmooth_use(a, "<");
    check_nonsmooth_use(b, "<");
    return a.d.val < b.d.val;
}

}  // namespace provi
