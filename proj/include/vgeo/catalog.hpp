#pragma once

#include "vgeo/cones_types.hpp"
#include "vgeo/set_oracle.hpp"

#include <string>
#include <vector>

namespace vgeo {

// Named feasible sets used throughout the test battery, plus the
// parametrized variants "graph:<expr>" and "epigraph:<expr>" (expr in x1).
SetOracle catalog(const std::string& name);

std::vector<std::string> catalog_names();

// Piecewise-linear teeth accumulating at 0: tooth k lives on
// (2^-(k+1), 2^-k] with slope +-2^-k, k >= 1; zero elsewhere.
double sawtooth(double x);

// Sets carrying a representation (F, D) that satisfies the constraint
// qualification at their standard base points.
std::vector<std::string> amenable_catalog();

// Representation of a catalog set at base; throws for names without one.
AmenableRep amenable_rep(const std::string& name, const Vec& base);

}  // namespace vgeo
