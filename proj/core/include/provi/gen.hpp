#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "provi/dist.hpp"
#include "provi/trace.hpp"

namespace provi {

class Gen;
using GenPtr = std::shared_ptr<const Gen>;

/// Host-level continuation. Must be pure: the same input value yields the
/// same subprogram (the reproducibility contract for interpretation).
using GenCont = std::function<GenPtr(const GroundValue&)>;

/// Importance-sampling configuration: proposal program and particle count.
struct ImportanceAlg {
    GenPtr proposal;
    int n_particles = 1;
};

/// Chooses the inference algorithm for the auxiliary posterior, given the
/// values of the kept addresses.
using AlgFn = std::function<ImportanceAlg(const Trace& kept_values)>;

/// Generative program node. Return/Sample/Observe form the exact core;
/// Marginal and Normalize are whole programs over traces whose densities
/// are estimated stochastically.
class Gen {
  public:
    struct Return {
        GroundValue value;
    };
    struct Sample {
        Dist dist;
        std::string name;
        GenCont cont;
    };
    struct Observe {
        Dist dist;
        GroundValue observed;
        GenPtr rest;
    };
    struct Marginal {
        std::vector<std::string> kept;
        GenPtr inner;
        AlgFn alg;
    };
    struct Normalize {
        GenPtr inner;
        ImportanceAlg alg;
    };
    using Node = std::variant<Return, Sample, Observe, Marginal, Normalize>;

    explicit Gen(Node n) : node_(std::move(n)) {}
    const Node& node() const { return node_; }

  private:
    Node node_;
};

/// Program that makes no choices and returns v (unit mass on the empty trace).
GenPtr gp_return(GroundValue v);

/// Program sampling `d` under `name`, continuing with `cont` on the value.
GenPtr gp_sample(Dist d, std::string name, GenCont cont);

/// Reweights the trace measure by the likelihood of y under d; makes no
/// choices. Throws TypeError when y does not match d's support type.
GenPtr gp_observe(Dist d, GroundValue y, GenPtr rest);

/// Marginal of `inner` on the `kept` addresses; densities are estimated by
/// importance sampling with the algorithm chosen per kept-value assignment.
GenPtr gp_marginal(std::vector<std::string> kept, GenPtr inner, AlgFn alg);

/// Sampling-importance-resampling approximation to `inner`'s normalized
/// posterior, with stochastically estimated output densities.
GenPtr gp_normalize(GenPtr inner, ImportanceAlg alg);

/// Exhaustive support of a finite, discrete program.
struct Enumeration {
    struct Entry {
        Trace trace;
        double density = 0.0;
        GroundValue retval;
    };
    std::vector<Entry> entries;
    /// Set when some path reused an address; such paths carry measure 0 and
    /// are dropped from `entries`.
    bool duplicate_names = false;

    double total_mass() const;
    const Entry* find(const Trace& t) const;
};

/// Brute-force oracle for the trace measure of programs built from
/// finite-support primitives only. Throws UnsupportedError when the program
/// samples an infinite-support primitive or contains estimator nodes.
Enumeration enumerate_discrete(const GenPtr& p);

}  // namespace provi
