#pragma once

#include "vgeo/cones_types.hpp"

#include <cstdint>

namespace vgeo {

/// Constraint-qualification check with a dual certificate. With int(D)
/// nonempty this maximizes the interior margin of F(base) + J r over a trust
/// region (the margin is concave for every supported body); a positive
/// optimum certifies the CQ, a zero optimum yields a separating normal.
/// Hull-deficient bodies are handled through the affine-hull reduction.
CQCertificate check_cq(const AmenableRep& rep, double tol = 1e-9);

// Verifies a certificate by direct sampling; used by tests and the CLI.
bool verify_cq_certificate(const AmenableRep& rep, const CQCertificate& cert, int samples = 1000,
                           std::uint64_t seed = 42);

/// Sampled tangent cone through the preimage formula: keep unit u with
/// J(x) u in T_D(F(x)).
ConeSample tangent_cone_amenable(const AmenableRep& rep, const Vec& x, int dirs,
                                 double tol = 1e-9, std::uint64_t seed = 42);

/// Sampled regular normal cone: keep unit v whose support ratio
/// sup { <v, x'-x>/|x'-x| : x' in C \cap B_r(x) } halves over dyadic radii.
ConeSample regular_normal_sample(const SetOracle& C, const Vec& x, double radius, int samples,
                                 double tol = 1e-3, std::uint64_t seed = 42);

}  // namespace vgeo
