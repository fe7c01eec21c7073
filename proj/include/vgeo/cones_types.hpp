#pragma once

#include "vgeo/set_oracle.hpp"

#include <string>
#include <vector>

namespace vgeo {

/// Local representation of an amenable set: the preimage oracle C = F^{-1}(D)
/// on a ball around the base point, with a cached base Jacobian.
struct AmenableRep {
    SetOracle oracle;   // Preimage variant
    Vec base;
    Mat base_jacobian;

    const SmoothMap& F() const { return oracle.F; }
    const ConvexBody& D() const { return oracle.D; }
    double radius() const { return oracle.radius; }

    static AmenableRep make(SetOracle preimage_oracle, const Vec& base);
};

enum class CQStatus { Holds, Fails };

struct CQCertificate {
    CQStatus status = CQStatus::Fails;
    // Holds: F(base) + lambda * J * w has an interior margin delta in D.
    Vec w;
    double lambda = 0.0;
    double delta = 0.0;
    // Fails: nonzero y in N_D(F(base)) with J^T y ~ 0.
    Vec y;
    double dual_residual = 0.0;
    bool reduced = false;   // certificate produced after an affine-hull reduction
    std::string note;
};

enum class ConeKind { Tangent, RegularNormal };

struct ConeSample {
    Vec base;
    std::vector<Vec> directions;   // unit vectors
    ConeKind kind = ConeKind::Tangent;
};

}  // namespace vgeo
