#pragma once

#include "vgeo/cones_types.hpp"
#include "vgeo/expr.hpp"
#include "vgeo/geometry.hpp"
#include "vgeo/paths.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vgeo {

struct FirstOrderResult {
    bool holds = true;             // holds-at-tolerance
    Vec gradient;
    Vec worst_direction;           // unit tangent with the most negative slope
    double worst_slope = 0.0;      // <grad, v>
    int directions_tested = 0;
    std::string note;
};

struct FirstOrderOptions {
    double tol = 1e-6;
    int dirs = 128;
    double probe_radius = 0.1;
    std::uint64_t seed = 42;
    ProjectionConfig proj;
};

/// First-order stationarity over C: negative tangent slopes are searched via
/// the amenable tangent formula when a representation is supplied, otherwise
/// via feasible-sequence chord directions at shrinking radii.
FirstOrderResult check_first_order(const ScalarExpr& f, const SetOracle& C, const Vec& x,
                                   const FirstOrderOptions& opts = {},
                                   const AmenableRep* rep = nullptr);

struct DescentReport {
    Vec x;
    Vec gradient;
    Vec direction;                 // unit tangent direction v with <grad, v> < 0
    double predicted_slope = 0.0;  // <grad, v>
    double measured_slope = 0.0;   // (f o gamma)'(0) per unit initial speed
    double eps_used = 0.0;
    double t_star = 0.0;           // largest grid t with f strictly decreasing on (0, t*]
    SampledCurve curve;
    std::vector<double> objective_values;
    std::string note;
};

/// Feasible descent path from a non-stationary point: realizes the negative
/// direction by a projected point sequence and joins it with an eps-path
/// (eps = -<grad,v>/(2|grad|), floored at 1e-3) or an averaging map.
DescentReport descent_path(const ScalarExpr& f, const SetOracle& C, const Vec& x,
                           const FirstOrderOptions& opts = {}, const AmenableRep* rep = nullptr,
                           double step_hint = 0.0);

// Armijo backtracking over the descent curve (convenience wrapper).
double backtracking_t(const DescentReport& report, double armijo = 1e-4);

}  // namespace vgeo
