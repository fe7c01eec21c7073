#pragma once

#include "vgeo/geometry.hpp"
#include "vgeo/paths.hpp"
#include "vgeo/set_oracle.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vgeo {

struct RefinementTrace {
    std::vector<double> lengths;            // per level, starting at the chord
    std::vector<double> displacements;      // max projected-midpoint displacement per level
    std::vector<int> node_counts;
    bool converged = false;                 // final length increment <= 1e-8
    int levels_run = 0;
};

struct AveragingOptions {
    int levels = 14;
    double stop_displacement = 1e-10;
    int exact_levels = 5;      // full multistart projection depth for multivalued screening
    ProjectionConfig proj;
};

/// Midpoint-projection refinement: level n+1 inserts the projection of each
/// consecutive midpoint. Lengths are nondecreasing; a multivalued projection
/// aborts with an error (prox-regularity failing at the working scale).
std::pair<SampledCurve, RefinementTrace> averaging_map(const SetOracle& C, const Vec& x,
                                                       const Vec& xp,
                                                       const AveragingOptions& opts = {});

using DistanceFn = std::function<double(const Vec&, const Vec&)>;

struct AveragingReport {
    double max_proportionality_error = 0.0;  // |d(g(t1),g(t2)) - |t1-t2| d(x,x')|, worst pair
    double dist_error_model = 0.0;
    EpsPathReport eps_report;
    bool proportional = false;
    bool passed = false;
};

AveragingReport verify_averaging_map(const SampledCurve& gamma, const SetOracle& C,
                                     const DistanceFn& dist, double dist_err_model, double eps,
                                     const PathOptions& opts = {});

struct IntrinsicDistance {
    Vec p, q;
    double estimate = 0.0;       // +inf when disconnected
    double pitch = 0.0;
    Polyline shortest;           // shortcut polyline through member cells
    bool reachable = false;
    std::string note;            // error model: overestimate O(pitch) per unit length
};

/// Brute-force intrinsic distance: shortest path in the graph of member grid
/// cells (full neighborhood in n <= 3), then string-pull shortcutting inside
/// the member tube.
IntrinsicDistance intrinsic_distance_grid(const SetOracle& C, const Vec& p, const Vec& q,
                                          double pitch);

// Distance callback backed by the grid oracle at the given pitch.
DistanceFn make_grid_distance(const SetOracle& C, double pitch);

struct SigmaFit {
    double r = 0.0;
    double sigma = 0.0;
    std::vector<std::pair<double, double>> samples;   // (d, d_C - d)
    double max_violation = 0.0;    // of d_C <= d + sigma (1+margin) d^3
    double margin = 0.25;
    double cross_check_error = 0.0;
    int pairs_used = 0;
};

/// Least-squares fit of the cubic intrinsic-defect constant:
/// d_C - d = sigma d^3 over member pairs in B_r(base).
SigmaFit fit_sigma(const SetOracle& C, const Vec& base, double r, int pairs,
                   const AveragingOptions& opts = {});

}  // namespace vgeo
