#pragma once

#include "vgeo/cones_types.hpp"
#include "vgeo/geometry.hpp"

#include <stdexcept>
#include <string>

namespace vgeo {

struct EpsPathReport {
    double requested_eps = 0.0;
    double achieved = 0.0;            // max_t |gamma'(t) - (x'-x)| / |x'-x|
    double length = 0.0;
    double chord = 0.0;
    double midline_linear = 0.0;      // max_t |gamma(t) - line(t)| / (t |x'-x|)
    double midline_quadratic = 0.0;   // max_t |gamma(t) - line(t)| / (2 t (1-t) |x'-x|)
    double feasibility_residual_max = 0.0;
    double endpoint_error = 0.0;
    bool passed = false;
    std::string note;
};

struct PathOptions {
    int nodes = 1025;           // uniform grid, N = 1024 intervals
    double feas_tol = 1e-7;
    double tol = 1e-9;
};

/// Local coordinates for the C^1 manifold F2^{-1}(0): orthonormal tangent
/// basis at the base point plus a frozen-Jacobian Gauss-Newton corrector.
class Chart {
public:
    Chart() = default;
    Chart(Vec base, SmoothMap F2);

    Vec to_manifold(const Vec& u) const;    // chart map, corrected onto F2^{-1}(0)
    Vec to_coords(const Vec& x) const;      // coordinate extraction
    Mat jacobian(const Vec& u) const;       // dH(u), by finite differences
    int coord_dim() const { return static_cast<int>(tangent_.cols()); }
    const Vec& base() const { return base_; }
    const Mat& tangent_basis() const { return tangent_; }
    const Mat& base_jacobian() const { return J20_; }
    double validity_radius() const { return validity_radius_; }

private:
    Vec base_;
    SmoothMap F2_;
    Mat tangent_;   // n x d orthonormal basis of Ker(J20)
    Mat J20_;
    Mat pinv_;      // pseudo-inverse of J20
    double validity_radius_ = 0.0;
};

struct RankDeficiency : std::runtime_error {
    Vec witness;   // unit left-null direction of the equality block, in R^m
    RankDeficiency(const std::string& msg, Vec w)
        : std::runtime_error(msg), witness(std::move(w)) {}
};

struct Reduction {
    Chart chart;
    AmenableRep reduced;   // representation in chart coordinates, int(D~) nonempty or k = 0
    int k = 0;             // affine-hull dimension of D
    Mat Q, Qperp;          // hull basis and complement in R^m
    Vec d0;                // hull base point
};

/// Affine-hull reduction for representations with int(D) empty: splits the
/// constraints into the hull-fixing equalities F2 and the hull-coordinate
/// part, and charts the manifold F2^{-1}(0).
Reduction reduce_representation(const AmenableRep& rep);

/// Quadratic interior-perturbation path: (1-t)x + tx' + eps t(1-t)|x-x'| w,
/// with w from the CQ certificate. All interior samples carry a strict
/// membership margin.
SampledCurve build_eps_path_interior(const AmenableRep& rep, const Vec& x, const Vec& xp,
                                     double eps, const PathOptions& opts = {});

SampledCurve pushforward_path(const Chart& chart, const SampledCurve& gamma);
SampledCurve pushforward_path(const SmoothMap& embedding, const SampledCurve& gamma);

std::pair<SampledCurve, EpsPathReport> build_eps_path(const AmenableRep& rep, const Vec& x,
                                                      const Vec& xp, double eps,
                                                      const PathOptions& opts = {});

EpsPathReport verify_eps_path(const SampledCurve& gamma, const SetOracle& C, const Vec& x,
                              const Vec& xp, double eps, const PathOptions& opts = {});

/// Largest dyadically-probed pair scale at which build_eps_path verifies at
/// eps; seeded by the certificate constants, halved until the probes pass.
double certify_radius(const AmenableRep& rep, double eps, const PathOptions& opts = {});

SampledCurve segment_curve(const Vec& x, const Vec& xp, int nodes);

}  // namespace vgeo
