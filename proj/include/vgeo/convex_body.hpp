#pragma once

#include "vgeo/geometry.hpp"

#include <string>
#include <vector>

namespace vgeo {

enum class BodyKind { Ball, Box, Halfspaces, Affine, Singleton, Product };

struct AffineHull {
    Vec point;   // a point of the hull
    Mat basis;   // m x k orthonormal
    int dim() const { return static_cast<int>(basis.cols()); }
};

struct NormalCone {
    std::vector<Vec> rays;   // unit generators, cone = { sum a_i rays + subspace b : a >= 0 }
    Mat subspace;            // m x s orthonormal columns (two-sided part)
    bool trivial() const { return rays.empty() && subspace.cols() == 0; }
};

/// Closed convex set in R^m with exact projection, signed interior margin,
/// tangent/normal cone queries and an affine hull. The variants cover the
/// bodies D appearing in representations C = F^{-1}(D).
class ConvexBody {
public:
    static ConvexBody ball(const Vec& center, double radius);
    static ConvexBody box(const Vec& lo, const Vec& hi);   // entries may be +-inf
    static ConvexBody halfspaces(const Mat& A, const Vec& b);  // { z : A z <= b }
    static ConvexBody affine(const Vec& point, const Mat& basis);
    static ConvexBody singleton(const Vec& point);
    static ConvexBody product(std::vector<ConvexBody> parts);

    static ConvexBody nonpositive_halfline();   // (-inf, 0] in R^1
    static ConvexBody orthant(int dim, double sign = 1.0);  // sign>0: z >= 0

    BodyKind kind() const { return kind_; }
    int dim() const { return dim_; }

    double dist(const Vec& z) const;          // Euclidean distance to the body
    Vec project(const Vec& z) const;          // exact nearest point
    bool contains(const Vec& z, double tol = 1e-9) const { return dist(z) <= tol; }

    // Radius of the largest ball centered at z inside the body; negative
    // distance when z is outside, 0 when the interior is empty.
    double interior_margin(const Vec& z) const;
    bool has_interior() const;

    bool tangent_contains(const Vec& z, const Vec& u, double tol = 1e-9) const;
    NormalCone normal_cone(const Vec& z, double tol = 1e-9) const;
    AffineHull affine_hull() const;

    // Body expressed in orthonormal coordinates of its affine hull
    // (dimension k >= 1). Supported for the variants whose hull-coordinates
    // remain a listed variant.
    ConvexBody reduce_to_affine_coords() const;

    std::string describe() const;

    // variant payloads (public: the type behaves as a tagged record)
    Vec ball_center;
    double ball_radius = 0.0;
    Vec box_lo, box_hi;
    Mat hs_A;     // rows normalized
    Vec hs_b;
    Vec aff_point;
    Mat aff_basis;   // orthonormal
    Vec point;
    std::vector<ConvexBody> parts;

private:
    BodyKind kind_ = BodyKind::Singleton;
    int dim_ = 0;
};

}  // namespace vgeo
