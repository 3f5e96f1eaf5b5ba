#pragma once

// Geometry of S^4 in R^5 and of its fold, the equatorial S^3 in C^2.
// Conventions: (z, w) = (x1 + i x2, x3 + i x4); the hemispheres carry the
// complex structure of their ball charts; on the fold the transverse
// direction d/dr points out of the upper hemisphere.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "folded/errors.hpp"
#include "folded/parallel.hpp"
#include "folded/spectral.hpp"

namespace folded {

using C2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;

enum class Side { Plus = 1, Minus = -1 };

inline double sign_of(Side s) { return s == Side::Plus ? 1.0 : -1.0; }

// Hermitian pairing, conjugate linear in the first slot.
inline cplx herm(const C2& a, const C2& b) { return std::conj(a(0)) * b(0) + std::conj(a(1)) * b(1); }

// The standard symplectic form of C^2.
inline double omega0(const C2& a, const C2& b) { return herm(a, b).imag(); }

struct Point4Sphere {
  Vec5 x = Vec5::Zero();

  double x0() const { return x(0); }
  C2 equatorial() const { return C2(cplx(x(1), x(2)), cplx(x(3), x(4))); }
  double norm_defect() const { return std::abs(x.norm() - 1.0); }
};

struct FoldPoint {
  cplx z{1.0, 0.0};
  cplx w{0.0, 0.0};

  FoldPoint() = default;
  FoldPoint(cplx z_, cplx w_) : z(z_), w(w_) {}
  explicit FoldPoint(const C2& v) : z(v(0)), w(v(1)) {}

  C2 vec() const { return C2(z, w); }
  double norm_defect() const { return std::abs(std::sqrt(std::norm(z) + std::norm(w)) - 1.0); }
};

inline FoldPoint normalize(const C2& v) {
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorKind::Domain, "cannot project the origin to S^3");
  return FoldPoint(v / n);
}

// Tangent vector to S^4 at a fold point: radial is the d/dr coefficient,
// vec the component tangent to S^3.
struct TangentAtFold {
  FoldPoint base;
  C2 vec = C2::Zero();
  double radial = 0.0;

  double base_defect() const { return std::abs(herm(base.vec(), vec).real()); }
};

// Closed characteristic x_m(theta) = (m e^{2 pi i theta}, 0).
struct CharacteristicParam {
  cplx m{1.0, 0.0};

  FoldPoint at(double theta) const { return FoldPoint(m * std::exp(cplx(0.0, kTwoPi * theta)), 0.0); }

  // Parameter of a point on the circle, in (-1/2, 1/2].
  double param_of(const FoldPoint& p, double tol = 1e-8) const {
    if (std::abs(p.w) > tol || std::abs(std::abs(p.z) - 1.0) > tol)
      throw Error(ErrorKind::OffCharacteristic, "point is not on the closed characteristic");
    return std::arg(p.z / m) / kTwoPi;
  }
};

inline Point4Sphere from_fold(const FoldPoint& p) {
  Point4Sphere q;
  q.x << 0.0, p.z.real(), p.z.imag(), p.w.real(), p.w.imag();
  return q;
}

inline Point4Sphere embed_hemisphere(Side side, const C2& y) {
  const double n2 = y.squaredNorm();
  if (std::sqrt(n2) > 1.0 + 1e-9) throw Error(ErrorKind::Domain, "chart point outside the closed unit ball");
  const double d = 1.0 + n2;
  const C2 v = 2.0 * y / d;
  Point4Sphere p;
  p.x << sign_of(side) * (1.0 - n2) / d, v(0).real(), v(0).imag(), v(1).real(), v(1).imag();
  return p;
}

// Inverse of embed_hemisphere on the closed hemisphere containing p.
inline C2 hemisphere_chart(const Point4Sphere& p) { return p.equatorial() / (1.0 + std::abs(p.x0())); }

inline C2 project_equator(const Point4Sphere& p) { return p.equatorial(); }

inline Point4Sphere involution(const Point4Sphere& p) {
  Point4Sphere q = p;
  q.x(0) = -q.x(0);
  return q;
}

inline double alpha_eval(const TangentAtFold& v) { return herm(v.base.vec(), v.vec).imag() / kTwoPi; }

inline TangentAtFold reeb_vector(const FoldPoint& p) {
  return TangentAtFold{p, cplx(0.0, kTwoPi) * p.vec(), 0.0};
}

inline FoldPoint reeb_flow(const FoldPoint& p, double t) {
  const cplx e = std::exp(cplx(0.0, kTwoPi * t));
  return FoldPoint(e * p.z, e * p.w);
}

inline C2 contact_unit(const FoldPoint& p) { return C2(-std::conj(p.w), std::conj(p.z)); }

inline C2 contact_project(const FoldPoint& p, const C2& v) { return v - herm(p.vec(), v) * p.vec(); }

// Complex coordinate of the contact part of v in the unit frame above.
inline cplx contact_coordinate(const FoldPoint& p, const C2& v) { return herm(contact_unit(p), v); }

struct FoldFrame {
  TangentAtFold K, L, F1, F2;
};

inline FoldFrame fold_frame(const FoldPoint& p) {
  const C2 f = contact_unit(p);
  return FoldFrame{TangentAtFold{p, C2::Zero(), 1.0}, reeb_vector(p), TangentAtFold{p, f, 0.0},
                   TangentAtFold{p, cplx(0.0, 1.0) * f, 0.0}};
}

// Fold metric dr^2 + alpha^2 + g_F, with g_F the round metric on the contact planes.
inline double fold_metric(const TangentAtFold& u, const TangentAtFold& v) {
  const C2 fu = contact_project(u.base, u.vec);
  const C2 fv = contact_project(v.base, v.vec);
  return u.radial * v.radial + alpha_eval(u) * alpha_eval(v) + herm(fu, fv).real();
}

inline TangentAtFold j_onesided(Side side, const TangentAtFold& v) {
  const double s = sign_of(side);
  const double l = alpha_eval(v);
  const C2 f = contact_project(v.base, v.vec);
  TangentAtFold out{v.base, C2::Zero(), -s * l};
  out.vec = s * v.radial * reeb_vector(v.base).vec + cplx(0.0, 1.0) * f;
  return out;
}

// Hopf map to the unit sphere in R^3; the north pole is [1:0].
inline Vec3 hopf_project(const FoldPoint& p) {
  const cplx q = p.w * std::conj(p.z);
  return Vec3(2.0 * q.real(), 2.0 * q.imag(), std::norm(p.z) - std::norm(p.w));
}

inline Vec3 hopf_differential(const FoldPoint& p, const C2& v) {
  const cplx dq = v(1) * std::conj(p.z) + p.w * std::conj(v(0));
  const double dh = 2.0 * (std::conj(p.z) * v(0)).real() - 2.0 * (std::conj(p.w) * v(1)).real();
  return Vec3(2.0 * dq.real(), 2.0 * dq.imag(), dh);
}

// Complex structure of the round S^2.
inline Vec3 sphere_j(const Vec3& P, const Vec3& v) { return P.cross(v); }

// omega^2 / dvol on the round S^4.
inline double det_omega(const Point4Sphere& p) { return 2.0 * p.x0() / (kPi * kPi); }

// Samples X = Pi(u) on a polar grid; row i is the ring at radial.nodes()[i].
struct PolarMapSamples {
  ChebyshevGrid radial;
  std::size_t M;
  std::vector<C2> values;

  const C2& at(std::size_t i, std::size_t j) const { return values[i * M + j]; }
};

// Samples a map given in polar form (r, theta) -> R^4 point.
template <class Map>
PolarMapSamples sample_polar(Map&& map, double r0, double r1, std::size_t nr, std::size_t M) {
  if (!(r1 > r0) || !is_power_of_two(M)) throw Error(ErrorKind::Resolution, "degenerate energy grid");
  PolarMapSamples s{ChebyshevGrid(r0, r1, nr), M, std::vector<C2>(nr * M)};
  parallel_for(nr, [&](std::size_t i) {
    const double r = s.radial.nodes()[i];
    for (std::size_t j = 0; j < M; ++j) s.values[i * M + j] = map(r, angle_at(j, M));
  });
  return s;
}

// Energy of the pullback of Pi^*(omega0)/pi over the grid, with orientation
// dr ^ dtheta.
inline double omega_energy(const PolarMapSamples& s) {
  const std::size_t nr = s.radial.size(), M = s.M;
  if (nr < 3 || !is_power_of_two(M) || s.values.size() != nr * M)
    throw Error(ErrorKind::Resolution, "degenerate energy grid");
  std::vector<C2> dth(nr * M), drr(nr * M);
  for (std::size_t i = 0; i < nr; ++i) {
    for (int c = 0; c < 2; ++c) {
      CVec ring(M);
      for (std::size_t j = 0; j < M; ++j) ring[j] = s.at(i, j)(c);
      CVec d = angular_derivative(std::span<const cplx>(ring));
      for (std::size_t j = 0; j < M; ++j) dth[i * M + j](c) = d[j];
    }
  }
  const Eigen::MatrixXd& D = s.radial.diff();
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      C2 acc = C2::Zero();
      for (std::size_t k = 0; k < nr; ++k)
        acc += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * s.at(k, j);
      drr[i * M + j] = acc;
    }
  double total = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    double ring = 0.0;
    for (std::size_t j = 0; j < M; ++j) ring += omega0(drr[i * M + j], dth[i * M + j]);
    total += s.radial.weights()[i] * ring * kTwoPi / static_cast<double>(M);
  }
  return total / kPi;
}

}  // namespace folded
