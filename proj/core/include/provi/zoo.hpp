#pragma once

#include <map>
#include <string>
#include <vector>

#include "provi/objectives.hpp"

namespace provi {

/// Per-address strategy overrides applied when a guide is built.
using StrategyOverrides = std::map<std::string, StrategyTag>;

/// Guide builder: parameters plus strategy overrides.
using GuideFn = std::function<GenPtr(const Params&, const StrategyOverrides&)>;

/// Built-in model with its guides, initial parameters and analytic
/// reference quantities (where they exist).
struct ZooEntry {
    std::string id;
    std::string blurb;
    ProgramFn model;
    std::map<std::string, GuideFn> guides;
    std::string default_guide;
    ParamVector init;
    std::map<std::string, double> analytic;

    // Hierarchical setup: joint guide to marginalize, kept addresses, the
    // per-kept-values algorithm (particle count supplied by the caller) and
    // the joint guide's own parameter point.
    std::string hvi_guide;
    std::vector<std::string> hvi_kept;
    std::function<AlgFn(const Params&, int)> hvi_alg;
    ParamVector hvi_init;

    ProgramFn guide(const std::string& guide_id, StrategyOverrides overrides = {}) const;
};

const ZooEntry& zoo_get(const std::string& id);
std::vector<std::string> zoo_ids();

/// Convenience: value of an analytic reference, throwing when absent.
double zoo_analytic(const ZooEntry& e, const std::string& key);

}  // namespace provi
