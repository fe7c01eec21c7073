#pragma once

#include "vgeo/expr.hpp"
#include "vgeo/geodesics.hpp"
#include "vgeo/set_oracle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vgeo {

enum class Verdict { NoViolationFound, Violated };

struct RegularityVerdict {
    std::string property;
    std::string set_name;
    Vec base;
    double eps = 0.0;
    double radius = 0.0;
    Verdict verdict = Verdict::NoViolationFound;
    // witness of a strict violation
    Vec wx, wxp, wv;
    double wt = 0.0;
    double lhs = 0.0, rhs = 0.0;
    double margin_min = std::numeric_limits<double>::infinity();  // min slack seen
    int samples = 0;
    std::uint64_t seed = 42;
    std::string note;

    bool violated() const { return verdict == Verdict::Violated; }
};

struct CheckOptions {
    int samples = 200;
    std::uint64_t seed = 42;
    ProjectionConfig proj;
    double strict_margin = 1e-12;   // relative margin a violation must clear
};

// <v, x'-x> <= eps |v| |x'-x| over member pairs and sampled/exact normals;
// the structured mirror family is searched first when the set declares one.
RegularityVerdict check_super_regularity(const SetOracle& C, const Vec& base, double eps,
                                         double r, const CheckOptions& opts = {});

// UAG: some direction d keeps the best feasible curve within eps t |d| of
// x + t d. Violations are heuristic (the direction fit is a search).
RegularityVerdict check_uag(const SetOracle& C, const Vec& base, double eps, double r,
                            const CheckOptions& opts = {},
                            const std::vector<std::pair<Vec, Vec>>* pairs = nullptr);

// d((1-t)x + tx', C) <= eps t (1-t) |x'-x| over pairs and a t-grid.
RegularityVerdict check_intrinsic_approx_convexity(const SetOracle& C, const Vec& base,
                                                   double eps, double r,
                                                   const CheckOptions& opts = {});

// f((1-t)x + tx') <= (1-t)f(x) + tf(x') + eps t(1-t)|x'-x|.
RegularityVerdict check_function_approx_convexity(const std::function<double(const Vec&)>& f,
                                                  const Vec& base, double eps, double r,
                                                  const CheckOptions& opts = {});
RegularityVerdict check_function_approx_convexity(const ScalarExpr& f, const Vec& base,
                                                  double eps, double r,
                                                  const CheckOptions& opts = {});

// Projects every off-set grid point in B_r(base); violated when a projection
// is multivalued (co-minimal nearest points separated beyond the cluster
// radius).
RegularityVerdict probe_prox_regularity(const SetOracle& C, const Vec& base, double r, int grid,
                                        const CheckOptions& opts = {});

// Exact Clarke-regularity verdict from closed-form cones of catalog sets.
RegularityVerdict clarke_verdict_catalog(const std::string& name, const Vec& x);

// Best candidate curves (feasible chord, corner-stopped feasible polyline,
// averaging map) scored by their achieved deviation; "violated" means no
// candidate beat eps -- a search result, not a proof.
RegularityVerdict search_eps_path_violation(const SetOracle& C, const Vec& base, double eps,
                                            const std::vector<std::pair<Vec, Vec>>& pairs,
                                            const CheckOptions& opts = {});

// The corner-stopped C^1 reparametrization of a feasible polyline: speed
// ramps to zero at every genuine corner, constant elsewhere.
SampledCurve corner_stop_curve(const Polyline& pl, int nodes = 2049, double corner_angle = 1e-3);

}  // namespace vgeo
