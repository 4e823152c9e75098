#pragma once

#include <map>
#include <string>
#include <string_view>

#include "provi/prob.hpp"
#include "provi/value.hpp"

namespace provi {

/// Runtime view of a parameter point handed to program builders. Each entry
/// is a Smooth-tagged real whose dual carries the tangent direction (forward
/// mode) or a tape leaf (reverse mode).
class Params {
  public:
    Params() = default;

    /// Forward-mode view: dual (theta_i, v_i).
    static Params forward(const ParamVector& pv);
    /// Frozen view: values only, tangents zeroed, cut from any tape. Used at
    /// stop-gradient boundaries.
    static Params frozen(const ParamVector& pv);
    /// Reverse-mode view: each parameter becomes a tape leaf. Fills
    /// `slots_out[i]` with the node index of parameter i.
    static Params leaves(const ParamVector& pv, std::vector<std::int32_t>& slots_out);

    const RealValue& operator[](std::string_view name) const;
    bool contains(std::string_view name) const { return by_name_.count(std::string(name)) > 0; }
    std::size_t size() const { return by_name_.size(); }

  private:
    std::map<std::string, RealValue, std::less<>> by_name_;
};

/// A loss as a function of parameters; the common shape of every objective.
using LossFn = std::function<LossEst(const Params&)>;

/// One dual sample whose tangent unbiasedly estimates the directional
/// derivative of the loss along pv.v. Finiteness and local domination of the
/// loss are the caller's (unchecked) obligations.
Dual adev_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng);

}  // namespace provi
