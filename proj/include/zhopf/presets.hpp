#pragma once

#include <map>
#include <string>

#include "zhopf/perturbed_system.hpp"

namespace zhopf {

// A case study instantiated by mechanically transforming the published model
// into the perturbed normal shape: linear change of variables, exact
// eps-series inversion, coefficient extraction, and shape verification.
struct CaseStudyPreset {
    std::string name;
    PerturbedSystem system;

    // substitution annihilating every first-order averaged component
    std::vector<std::pair<int, ParamPoly>> vanishing;

    // symbols defined in terms of the others (evaluated during binding, in
    // order; e.g. the quadratic-denominator invariant of the 4d system)
    std::vector<std::pair<int, ParamPoly>> defined;

    // Full parameter binding from named values. Missing names default to 0;
    // defined symbols are computed, and when `vanished` is set the
    // elimination substitutions are applied first. Throws when a
    // declared-nonzero symbol evaluates to zero.
    std::vector<Rat> bind(const std::map<std::string, Rat>& values, bool vanished = false) const;

    PerturbedSystem vanished_system() const { return system.substituted(vanishing); }
};

// name is "third_order" or "hyperchaotic"; k is the perturbation order kept
// (1..3 for the cubic equation, 1..2 for the hyperchaotic system).
CaseStudyPreset build_preset(const std::string& name, int k = 2);

}  // namespace zhopf
