#pragma once

#include "vgeo/convex_body.hpp"
#include "vgeo/expr.hpp"
#include "vgeo/geometry.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace vgeo {

/// C^1 map R^n -> R^m with optional analytic Jacobian; finite differences
/// otherwise.
struct SmoothMap {
    int domain_dim = 0;
    int codomain_dim = 0;
    std::function<Vec(const Vec&)> eval;
    std::function<Mat(const Vec&)> jac;       // optional
    std::vector<ScalarExpr> exprs;            // retained when built from text

    Vec operator()(const Vec& x) const { return eval(x); }
    Mat jacobian(const Vec& x) const { return jac ? jac(x) : fd_jacobian(eval, x); }

    static SmoothMap identity(int n);
    static SmoothMap from_exprs(const std::vector<ScalarExpr>& components, int n);
    static SmoothMap linear(const Mat& A);
};

struct ProjectionConfig {
    int multistart = 64;
    double tol = 1e-10;           // local solver tolerance
    double cluster = 1e-6;        // dedup radius for returned points
    double comin_factor = 1.05;   // candidates within this factor of best are co-minimal
    int max_iter = 120;
    std::uint64_t seed = 42;
};

enum class OracleKind { Preimage, FunctionGraph, FunctionEpigraph, CurveUnion, GridCloud };

struct ParametricBranch {
    std::function<Vec(double)> point;
    double t_lo = 0.0, t_hi = 1.0;
};

/// A feasible region exposed through membership, multistart projection and
/// bounding-box queries. Variants: preimages F^{-1}(D), function graphs and
/// epigraphs, unions of parametric curves, and point clouds (the brute-force
/// comparison oracle).
class SetOracle {
public:
    OracleKind kind = OracleKind::GridCloud;
    int dim = 0;
    std::string name;

    // Preimage
    SmoothMap F;
    ConvexBody D = ConvexBody::singleton(Vec::Zero(1));
    Vec center;
    double radius = std::numeric_limits<double>::infinity();

    // FunctionGraph / FunctionEpigraph (domain is the first dim-1 coords)
    std::function<double(const Vec&)> f;
    ScalarExpr f_expr;   // set when built from text
    Vec dom_lo, dom_hi;

    // CurveUnion
    std::vector<ParametricBranch> branches;

    // GridCloud
    std::vector<Vec> cloud;
    double pitch = 0.0;

    // catalog hooks (optional closed forms and structure declarations)
    std::function<std::vector<Vec>(const Vec&)> exact_project_multi;
    std::function<Polyline(const Vec&, const Vec&)> exact_curve;   // feasible chain between members
    std::function<std::vector<Vec>(const Vec&, double, int, std::uint64_t)> sampler;
    std::function<std::vector<Vec>(const Vec&)> exact_normal_rays;  // generators of the regular normal cone
    int mirror_axis = -1;   // coordinate flipped by a declared set symmetry
    std::function<bool(int, Vec&, Vec&, Vec&)> witness_family;  // k -> (x, x', v)

    // Distance-like defect of x from the set (0 on it): the residual through
    // the defining variant, not the Euclidean set distance.
    double residual(const Vec& x) const;
    bool membership(const Vec& x, double tol = 1e-9) const;

    // All co-minimal local nearest points, sorted by distance.
    std::vector<Vec> project(const Vec& x, const ProjectionConfig& cfg = {}) const;
    Vec project_one(const Vec& x, const ProjectionConfig& cfg = {}) const;

    std::pair<Vec, Vec> bounding_box() const;

    // Members of C within B_r(x); best effort, may return fewer than count.
    std::vector<Vec> sample_near(const Vec& x, double r, int count, std::uint64_t seed) const;

    static SetOracle preimage(SmoothMap F, ConvexBody D, Vec center, double radius);
    static SetOracle graph(std::function<double(const Vec&)> f, Vec lo, Vec hi);
    static SetOracle graph_expr(const ScalarExpr& e, Vec lo, Vec hi);
    static SetOracle epigraph(std::function<double(const Vec&)> f, Vec lo, Vec hi);
    static SetOracle epigraph_expr(const ScalarExpr& e, Vec lo, Vec hi);
    static SetOracle curve_union(std::vector<ParametricBranch> branches, int dim);
    static SetOracle grid_cloud(std::vector<Vec> points, double pitch);
};

// 1-D multistart minimizer used by curve/graph projections: coarse grid plus
// golden-section refinement of every local bracket. Returns local minima (t).
std::vector<double> minimize_1d_multistart(const std::function<double(double)>& g, double lo,
                                           double hi, int coarse = 257, double tol = 1e-12);

}  // namespace vgeo
