#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

/// A curve sampled on a strictly increasing grid covering [0,1], with a
/// derivative estimate at every node.
struct SampledCurve {
    Eigen::VectorXd grid;        // t_0 = 0 < ... < t_N = 1
    std::vector<Vec> points;
    std::vector<Vec> deriv;
    std::string meta;

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
    void validate() const;   // throws std::invalid_argument on malformed data
};

using Polyline = std::vector<Vec>;

double polyline_length(const Polyline& pts);

// Polygonal length over the curve's grid. Never decreases under refinement.
double curve_length(const SampledCurve& c);

// Three-point finite differences: central at interior nodes, second-order
// one-sided at the endpoints. Exact for curves quadratic in t.
std::vector<Vec> fd_derivative(const std::vector<Vec>& points, const Eigen::VectorXd& grid);

// Step balancing truncation against rounding for central differences.
double default_fd_step(const Vec& x);

// Central-difference Jacobian of an R^n -> R^m map.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x, double h = 0.0);

Eigen::VectorXd uniform_grid(int nodes);

// Build a SampledCurve from a parametrization on [0,1]; derivatives by fd
// unless an analytic velocity is supplied.
SampledCurve sample_curve(const std::function<Vec(double)>& f, int nodes,
                          const std::function<Vec(double)>* velocity = nullptr,
                          const std::string& meta = "");

// Deterministic low-discrepancy unit directions (additive lattice on angles,
// mapped through a normal quantile per coordinate and normalized).
std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed);

// Latin hypercube sample of `count` points in the box [lo, hi].
std::vector<Vec> latin_hypercube(const Vec& lo, const Vec& hi, int count, std::uint64_t seed);

// Max second difference of the curve at grid stride `stride` (uniform grid).
double max_second_difference(const SampledCurve& c, int stride = 1);

// Estimated decay order p of the max second difference under parameter
// refinement: S(h) ~ h^p. Order >= ~2 indicates a C^1 curve at the sampled
// resolution; order ~1 indicates a corner.
double second_difference_order(const std::function<Vec(double)>& f, int nodes = 257);

struct ParallelConfig {
    static int threads();   // VGEO_THREADS env var, default 1
};

// Index-parallel loop with deterministic slot writes.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace vgeo
