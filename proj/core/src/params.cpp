#include "provi/params.hpp"

namespace provi {

void ParamVector::validate() const {
    if (names.size() != theta.size() || names.size() != v.size())
        throw DomainError("parameter names, values and direction must have equal length");
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j]) throw DomainError("duplicate parameter name " + names[i]);
}

ParamVector ParamVector::with_direction(std::vector<double> dir) const {
    return ParamVector(names, theta, std::move(dir));
}

ParamVector ParamVector::basis_direction(std::size_t i) const {
    std::vector<double> dir(theta.size(), 0.0);
    dir.at(i) = 1.0;
    return with_direction(std::move(dir));
}

Params Params::forward(const ParamVector& pv) {
    pv.validate();
    Params p;
    for (std::size_t i = 0; i < pv.size(); ++i)
        p.by_name_[pv.names[i]] = smooth_real(make_dual(pv.theta[i], pv.v[i]), pv.names[i]);
    return p;
}

Params Params::frozen(const ParamVector& pv) {
    Params p;
    for (std::size_t i = 0; i < pv.size(); ++i)
        p.by_name_[pv.names[i]] = smooth_real(make_dual(pv.theta[i], 0.0), pv.names[i]);
    return p;
}

Params Params::leaves(const ParamVector& pv, std::vector<std::int32_t>& slots_out) {
    pv.validate();
    Params p;
    slots_out.resize(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const Dual leaf = tape_leaf(pv.theta[i]);
        slots_out[i] = leaf.node;
        p.by_name_[pv.names[i]] = smooth_real(leaf, pv.names[i]);
    }
    return p;
}

const RealValue& Params::operator[](std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw DomainError("unknown parameter '" + std::string(name) + "'");
    return it->second;
}

Dual adev_grad(const LossFn& loss, const ParamVector& pv, RngStream& rng) {
    return loss(Params::forward(pv)).sample(rng);
}

}  // namespace provi
