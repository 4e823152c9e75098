#include "provi/dist.hpp"

#include <cmath>

namespace provi {

const char* to_string(Family f) {
    switch (f) {
        case Family::Normal: return "normal";
        case Family::Flip: return "flip";
        case Family::Categorical: return "categorical";
        case Family::UniformStar: return "uniform";
        case Family::Poisson: return "poisson";
        case Family::BetaStar: return "beta";
    }
    return "?";
}

const char* to_string(StrategyTag s) {
    switch (s) {
        case StrategyTag::Reparam: return "reparam";
        case StrategyTag::Reinforce: return "reinforce";
        case StrategyTag::Enum: return "enum";
        case StrategyTag::Mvd: return "mvd";
        case StrategyTag::NoneStar: return "none";
    }
    return "?";
}

StrategyTag parse_strategy(const std::string& tag) {
    if (tag == "reparam") return StrategyTag::Reparam;
    if (tag == "reinforce") return StrategyTag::Reinforce;
    if (tag == "enum") return StrategyTag::Enum;
    if (tag == "mvd") return StrategyTag::Mvd;
    if (tag == "none") return StrategyTag::NoneStar;
    throw DomainError("unknown strategy tag '" + tag + "'");
}

Dist Dist::normal(RealValue mu, RealValue sigma, StrategyTag s) {
    if (s != StrategyTag::Reparam && s != StrategyTag::Reinforce)
        throw DomainError("normal supports strategies reparam|reinforce");
    if (!(sigma.d.val > 0.0)) throw DomainError("normal needs sigma > 0");
    return Dist(Family::Normal, s, {std::move(mu), std::move(sigma)});
}

Dist Dist::flip(RealValue p, StrategyTag s) {
    if (s != StrategyTag::Enum && s != StrategyTag::Reinforce && s != StrategyTag::Mvd)
        throw DomainError("flip supports strategies enum|reinforce|mvd");
    if (!(p.d.val >= 0.0 && p.d.val <= 1.0)) throw DomainError("flip needs p in [0,1]");
    return Dist(Family::Flip, s, {std::move(p)});
}

Dist Dist::categorical(std::vector<RealValue> probs, StrategyTag s) {
    if (s != StrategyTag::Enum && s != StrategyTag::Reinforce)
        throw DomainError("categorical supports strategies enum|reinforce");
    if (probs.empty()) throw DomainError("categorical needs at least one probability");
    Dual total{};
    for (const auto& p : probs) {
        if (p.d.val < 0.0) throw DomainError("categorical probabilities must be nonnegative");
        total = total + p.d;
    }
    if (std::fabs(total.val - 1.0) > 1e-9)
        throw DomainError("categorical probabilities must sum to 1 within 1e-9");
    // Renormalize exactly, in dual arithmetic, so downstream weights stay
    // consistent with the constructor's tolerance.
    for (auto& p : probs) p.d = p.d / total;
    return Dist(Family::Categorical, s, std::move(probs));
}

Dist Dist::uniform_star(RealValue lo, RealValue hi) {
    check_nonsmooth_use(lo, "uniform bound");
    check_nonsmooth_use(hi, "uniform bound");
    if (!(lo.d.val < hi.d.val)) throw DomainError("uniform needs lo < hi");
    return Dist(Family::UniformStar, StrategyTag::NoneStar, {std::move(lo), std::move(hi)});
}

Dist Dist::poisson(RealValue rate) {
    if (!(rate.d.val > 0.0)) throw DomainError("poisson needs rate > 0");
    return Dist(Family::Poisson, StrategyTag::Reinforce, {std::move(rate)});
}

Dist Dist::beta_star(RealValue a, RealValue b) {
    check_nonsmooth_use(a, "beta shape");
    check_nonsmooth_use(b, "beta shape");
    if (!(a.d.val > 0.0 && b.d.val > 0.0)) throw DomainError("beta needs positive shapes");
    return Dist(Family::BetaStar, StrategyTag::NoneStar, {std::move(a), std::move(b)});
}

GroundType Dist::output_type() const {
    switch (family_) {
        case Family::Normal:
        case Family::UniformStar:
        case Family::BetaStar: return GroundType::Real;
        case Family::Flip: return GroundType::Bool;
        case Family::Categorical:
        case Family::Poisson: return GroundType::Int;
    }
    return GroundType::Unit;
}

Smoothness Dist::output_smoothness() const {
    return (family_ == Family::Normal && strategy_ == StrategyTag::Reparam) ? Smoothness::Smooth
                                                                            : Smoothness::Star;
}

std::size_t Dist::support_size() const {
    switch (family_) {
        case Family::Flip: return 2;
        case Family::Categorical: return params_.size();
        default: throw UnsupportedError("support_size: infinite-support primitive");
    }
}

GroundValue Dist::support_value(std::size_t i) const {
    switch (family_) {
        case Family::Flip: return GroundValue::boolean(i == 0);
        case Family::Categorical: return GroundValue::integer(static_cast<std::int64_t>(i));
        default: throw UnsupportedError("support_value: infinite-support primitive");
    }
}

}  // namespace provi
