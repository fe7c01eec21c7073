#include "vgeo/convex_body.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Mat orthonormalize(const Mat& B) {
    if (B.cols() == 0) return B;
    Eigen::ColPivHouseholderQR<Mat> qr(B);
    const int r = static_cast<int>(qr.rank());
    Mat Q = qr.householderQ() * Mat::Identity(B.rows(), r);
    return Q;
}

Mat orthogonal_complement(const Mat& Q, int m) {
    // columns spanning the complement of span(Q) in R^m
    Mat full = Mat::Identity(m, m);
    if (Q.cols() == 0) return full;
    Mat P = full - Q * Q.transpose();
    Eigen::ColPivHouseholderQR<Mat> qr(P);
    const int r = static_cast<int>(qr.rank());
    return qr.householderQ() * Mat::Identity(m, r);
}
}  // namespace

ConvexBody ConvexBody::ball(const Vec& center, double radius) {
    if (radius < 0) throw std::invalid_argument("ball: negative radius");
    ConvexBody b;
    b.kind_ = BodyKind::Ball;
    b.dim_ = static_cast<int>(center.size());
    b.ball_center = center;
    b.ball_radius = radius;
    return b;
}

ConvexBody ConvexBody::box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box: bound size mismatch");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo(i) > hi(i)) throw std::invalid_argument("box: lo > hi");
    ConvexBody b;
    b.kind_ = BodyKind::Box;
    b.dim_ = static_cast<int>(lo.size());
    b.box_lo = lo;
    b.box_hi = hi;
    return b;
}

ConvexBody ConvexBody::halfspaces(const Mat& A, const Vec& b) {
    if (A.rows() != b.size()) throw std::invalid_argument("halfspaces: row mismatch");
    ConvexBody c;
    c.kind_ = BodyKind::Halfspaces;
    c.dim_ = static_cast<int>(A.cols());
    c.hs_A = A;
    c.hs_b = b;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double n = c.hs_A.row(i).norm();
        if (n < 1e-14) throw std::invalid_argument("halfspaces: zero normal row");
        c.hs_A.row(i) /= n;
        c.hs_b(i) /= n;
    }
    return c;
}

ConvexBody ConvexBody::affine(const Vec& point, const Mat& basis) {
    ConvexBody c;
    c.kind_ = BodyKind::Affine;
    c.dim_ = static_cast<int>(point.size());
    c.aff_point = point;
    c.aff_basis = orthonormalize(basis);
    return c;
}

ConvexBody ConvexBody::singleton(const Vec& point) {
    ConvexBody c;
    c.kind_ = BodyKind::Singleton;
    c.dim_ = static_cast<int>(point.size());
    c.point = point;
    return c;
}

ConvexBody ConvexBody::product(std::vector<ConvexBody> ps) {
    if (ps.empty()) throw std::invalid_argument("product: empty");
    ConvexBody c;
    c.kind_ = BodyKind::Product;
    c.dim_ = 0;
    for (const auto& p : ps) c.dim_ += p.dim();
    c.parts = std::move(ps);
    return c;
}

ConvexBody ConvexBody::nonpositive_halfline() {
    Vec lo(1), hi(1);
    lo(0) = -kInf;
    hi(0) = 0.0;
    return box(lo, hi);
}

ConvexBody ConvexBody::orthant(int dim, double sign) {
    Vec lo(dim), hi(dim);
    if (sign > 0) {
        lo.setZero();
        hi.setConstant(kInf);
    } else {
        lo.setConstant(-kInf);
        hi.setZero();
    }
    return box(lo, hi);
}

Vec ConvexBody::project(const Vec& z) const {
    switch (kind_) {
        case BodyKind::Ball: {
            const Vec d = z - ball_center;
            const double n = d.norm();
            if (n <= ball_radius) return z;
            return ball_center + d * (ball_radius / n);
        }
        case BodyKind::Box: {
            Vec p = z;
            for (Eigen::Index i = 0; i < p.size(); ++i)
                p(i) = std::min(std::max(p(i), box_lo(i)), box_hi(i));
            return p;
        }
        case BodyKind::Halfspaces: {
            const int h = static_cast<int>(hs_A.rows());
            // active-set enumeration; the catalog uses few halfspaces
            if ((hs_A * z - hs_b).maxCoeff() <= 0) return z;
            Vec best;
            double best_d = kInf;
            for (unsigned mask = 1; mask < (1u << h); ++mask) {
                std::vector<int> idx;
                for (int i = 0; i < h; ++i)
                    if (mask & (1u << i)) idx.push_back(i);
                Mat As(static_cast<int>(idx.size()), dim_);
                Vec bs(static_cast<int>(idx.size()));
                for (size_t r = 0; r < idx.size(); ++r) {
                    As.row(static_cast<int>(r)) = hs_A.row(idx[r]);
                    bs(static_cast<int>(r)) = hs_b(idx[r]);
                }
                Mat G = As * As.transpose();
                Eigen::FullPivLU<Mat> lu(G);
                if (!lu.isInvertible()) continue;
                Vec lam = lu.solve(As * z - bs);
                if (lam.minCoeff() < -1e-12) continue;  // dual infeasible
                Vec p = z - As.transpose() * lam;
                if ((hs_A * p - hs_b).maxCoeff() > 1e-9) continue;
                const double d = (p - z).norm();
                if (d < best_d) {
                    best_d = d;
                    best = p;
                }
            }
            if (best.size() == 0) throw std::runtime_error("halfspace projection failed");
            return best;
        }
        case BodyKind::Affine:
            return aff_point + aff_basis * (aff_basis.transpose() * (z - aff_point));
        case BodyKind::Singleton: return point;
        case BodyKind::Product: {
            Vec p(dim_);
            int off = 0;
            for (const auto& part : parts) {
                p.segment(off, part.dim()) = part.project(z.segment(off, part.dim()));
                off += part.dim();
            }
            return p;
        }
    }
    throw std::logic_error("project: bad kind");
}

double ConvexBody::dist(const Vec& z) const { return (z - project(z)).norm(); }

double ConvexBody::interior_margin(const Vec& z) const {
    const double d = dist(z);
    if (d > 0) return -d;
    switch (kind_) {
        case BodyKind::Ball: return ball_radius - (z - ball_center).norm();
        case BodyKind::Box: {
            double m = kInf;
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                if (box_lo(i) == box_hi(i)) return 0.0;  // flat side, no interior
                if (std::isfinite(box_lo(i))) m = std::min(m, z(i) - box_lo(i));
                if (std::isfinite(box_hi(i))) m = std::min(m, box_hi(i) - z(i));
            }
            return m;
        }
        case BodyKind::Halfspaces: {
            double m = kInf;
            for (Eigen::Index i = 0; i < hs_A.rows(); ++i)
                m = std::min(m, hs_b(i) - hs_A.row(i).dot(z));
            return m;
        }
        case BodyKind::Affine: return aff_basis.cols() == dim_ ? kInf : 0.0;
        case BodyKind::Singleton: return dim_ == 0 ? kInf : 0.0;
        case BodyKind::Product: {
            double m = kInf;
            int off = 0;
            for (const auto& part : parts) {
                m = std::min(m, part.interior_margin(z.segment(off, part.dim())));
                off += part.dim();
            }
            return m;
        }
    }
    throw std::logic_error("interior_margin: bad kind");
}

bool ConvexBody::has_interior() const {
    switch (kind_) {
        case BodyKind::Ball: return ball_radius > 0;
        case BodyKind::Box: {
            for (Eigen::Index i = 0; i < box_lo.size(); ++i)
                if (box_lo(i) >= box_hi(i)) return false;
            return true;
        }
        case BodyKind::Halfspaces: return true;  // assumed full-dimensional
        case BodyKind::Affine: return aff_basis.cols() == dim_;
        case BodyKind::Singleton: return dim_ == 0;
        case BodyKind::Product: {
            for (const auto& p : parts)
                if (!p.has_interior()) return false;
            return true;
        }
    }
    return false;
}

bool ConvexBody::tangent_contains(const Vec& z, const Vec& u, double tol) const {
    switch (kind_) {
        case BodyKind::Ball: {
            if (ball_radius - (z - ball_center).norm() > tol) return true;  // interior
            return (z - ball_center).dot(u) <= tol * std::max(1.0, u.norm());
        }
        case BodyKind::Box: {
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                if (std::isfinite(box_lo(i)) && z(i) - box_lo(i) <= tol && u(i) < -tol) return false;
                if (std::isfinite(box_hi(i)) && box_hi(i) - z(i) <= tol && u(i) > tol) return false;
            }
            return true;
        }
        case BodyKind::Halfspaces: {
            for (Eigen::Index i = 0; i < hs_A.rows(); ++i)
                if (hs_b(i) - hs_A.row(i).dot(z) <= tol && hs_A.row(i).dot(u) > tol) return false;
            return true;
        }
        case BodyKind::Affine:
            return (u - aff_basis * (aff_basis.transpose() * u)).norm() <= tol;
        case BodyKind::Singleton: return u.norm() <= tol;
        case BodyKind::Product: {
            int off = 0;
            for (const auto& part : parts) {
                if (!part.tangent_contains(z.segment(off, part.dim()),
                                           u.segment(off, part.dim()), tol))
                    return false;
                off += part.dim();
            }
            return true;
        }
    }
    throw std::logic_error("tangent_contains: bad kind");
}

NormalCone ConvexBody::normal_cone(const Vec& z, double tol) const {
    NormalCone nc;
    switch (kind_) {
        case BodyKind::Ball: {
            const double slack = ball_radius - (z - ball_center).norm();
            if (slack <= tol && (z - ball_center).norm() > 1e-14)
                nc.rays.push_back((z - ball_center).normalized());
            nc.subspace = Mat::Zero(dim_, 0);
            return nc;
        }
        case BodyKind::Box: {
            std::vector<int> flat;
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                if (box_lo(i) == box_hi(i)) {
                    flat.push_back(static_cast<int>(i));
                    continue;
                }
                if (std::isfinite(box_lo(i)) && z(i) - box_lo(i) <= tol) {
                    Vec e = Vec::Zero(dim_);
                    e(i) = -1.0;
                    nc.rays.push_back(e);
                }
                if (std::isfinite(box_hi(i)) && box_hi(i) - z(i) <= tol) {
                    Vec e = Vec::Zero(dim_);
                    e(i) = 1.0;
                    nc.rays.push_back(e);
                }
            }
            nc.subspace = Mat::Zero(dim_, static_cast<int>(flat.size()));
            for (size_t j = 0; j < flat.size(); ++j) nc.subspace(flat[j], static_cast<int>(j)) = 1.0;
            return nc;
        }
        case BodyKind::Halfspaces: {
            for (Eigen::Index i = 0; i < hs_A.rows(); ++i)
                if (hs_b(i) - hs_A.row(i).dot(z) <= tol)
                    nc.rays.push_back(hs_A.row(i).transpose());
            nc.subspace = Mat::Zero(dim_, 0);
            return nc;
        }
        case BodyKind::Affine: {
            nc.subspace = orthogonal_complement(aff_basis, dim_);
            return nc;
        }
        case BodyKind::Singleton: {
            nc.subspace = Mat::Identity(dim_, dim_);
            return nc;
        }
        case BodyKind::Product: {
            int off = 0;
            std::vector<Mat> subs;
            int subcols = 0;
            for (const auto& part : parts) {
                NormalCone sub = part.normal_cone(z.segment(off, part.dim()), tol);
                for (const auto& r : sub.rays) {
                    Vec e = Vec::Zero(dim_);
                    e.segment(off, part.dim()) = r;
                    nc.rays.push_back(e);
                }
                subs.push_back(sub.subspace);
                subcols += static_cast<int>(sub.subspace.cols());
                off += part.dim();
            }
            nc.subspace = Mat::Zero(dim_, subcols);
            int coff = 0;
            off = 0;
            for (size_t p = 0; p < parts.size(); ++p) {
                const Mat& s = subs[p];
                nc.subspace.block(off, coff, parts[p].dim(), s.cols()) = s;
                coff += static_cast<int>(s.cols());
                off += parts[p].dim();
            }
            return nc;
        }
    }
    throw std::logic_error("normal_cone: bad kind");
}

AffineHull ConvexBody::affine_hull() const {
    AffineHull h;
    switch (kind_) {
        case BodyKind::Ball:
            h.point = ball_center;
            h.basis = Mat::Identity(dim_, dim_);
            return h;
        case BodyKind::Box: {
            h.point = Vec::Zero(dim_);
            std::vector<int> free;
            for (Eigen::Index i = 0; i < box_lo.size(); ++i) {
                if (box_lo(i) < box_hi(i)) {
                    free.push_back(static_cast<int>(i));
                    h.point(i) = std::isfinite(box_lo(i))
                                     ? box_lo(i)
                                     : (std::isfinite(box_hi(i)) ? box_hi(i) : 0.0);
                } else {
                    h.point(i) = box_lo(i);
                }
            }
            h.basis = Mat::Zero(dim_, static_cast<int>(free.size()));
            for (size_t j = 0; j < free.size(); ++j) h.basis(free[j], static_cast<int>(j)) = 1.0;
            return h;
        }
        case BodyKind::Halfspaces:
            h.point = project(Vec::Zero(dim_));
            h.basis = Mat::Identity(dim_, dim_);
            return h;
        case BodyKind::Affine:
            h.point = aff_point;
            h.basis = aff_basis;
            return h;
        case BodyKind::Singleton:
            h.point = point;
            h.basis = Mat::Zero(dim_, 0);
            return h;
        case BodyKind::Product: {
            h.point = Vec(dim_);
            int off = 0, k = 0;
            std::vector<AffineHull> hulls;
            for (const auto& part : parts) {
                hulls.push_back(part.affine_hull());
                h.point.segment(off, part.dim()) = hulls.back().point;
                k += hulls.back().dim();
                off += part.dim();
            }
            h.basis = Mat::Zero(dim_, k);
            int coff = 0;
            off = 0;
            for (size_t p = 0; p < parts.size(); ++p) {
                h.basis.block(off, coff, parts[p].dim(), hulls[p].dim()) = hulls[p].basis;
                coff += hulls[p].dim();
                off += parts[p].dim();
            }
            return h;
        }
    }
    throw std::logic_error("affine_hull: bad kind");
}

ConvexBody ConvexBody::reduce_to_affine_coords() const {
    switch (kind_) {
        case BodyKind::Box: {
            std::vector<int> free;
            for (Eigen::Index i = 0; i < box_lo.size(); ++i)
                if (box_lo(i) < box_hi(i)) free.push_back(static_cast<int>(i));
            Vec lo(static_cast<int>(free.size())), hi(static_cast<int>(free.size()));
            const AffineHull h = affine_hull();
            for (size_t j = 0; j < free.size(); ++j) {
                lo(static_cast<int>(j)) = box_lo(free[j]) - h.point(free[j]);
                hi(static_cast<int>(j)) = box_hi(free[j]) - h.point(free[j]);
            }
            return box(lo, hi);
        }
        case BodyKind::Affine: {
            const int k = static_cast<int>(aff_basis.cols());
            Vec lo = Vec::Constant(k, -kInf), hi = Vec::Constant(k, kInf);
            return box(lo, hi);
        }
        case BodyKind::Product: {
            std::vector<ConvexBody> reduced;
            for (const auto& part : parts) {
                if (part.affine_hull().dim() == 0) continue;  // fixed factor drops out
                reduced.push_back(part.affine_hull().dim() == part.dim() && part.has_interior()
                                      ? part
                                      : part.reduce_to_affine_coords());
            }
            if (reduced.empty()) throw std::invalid_argument("reduce: zero-dimensional hull");
            if (reduced.size() == 1) return reduced[0];
            return product(std::move(reduced));
        }
        case BodyKind::Singleton:
            throw std::invalid_argument("reduce: zero-dimensional hull");
        default:
            if (has_interior())
                throw std::invalid_argument("int(D) nonempty; reduction not applicable");
            throw std::invalid_argument("reduce: unsupported variant");
    }
}

std::string ConvexBody::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case BodyKind::Ball: os << "ball(r=" << ball_radius << ")"; break;
        case BodyKind::Box: os << "box(dim=" << dim_ << ")"; break;
        case BodyKind::Halfspaces: os << "halfspaces(" << hs_A.rows() << ")"; break;
        case BodyKind::Affine: os << "affine(dim=" << aff_basis.cols() << ")"; break;
        case BodyKind::Singleton: os << "singleton"; break;
        case BodyKind::Product: os << "product(" << parts.size() << ")"; break;
    }
    return os.str();
}

}  // namespace vgeo
