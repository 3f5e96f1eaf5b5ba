#pragma once

// Compatible triples from a metric and a (possibly nearly degenerate) 2-form:
// the g-skew endomorphism A with omega(u, v) = g(Au, v), its splitting into
// invariant 2-planes, and the polar factor J.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "folded/core_geometry.hpp"
#include "folded/errors.hpp"

namespace folded {

using Mat4 = Eigen::Matrix4d;
using Frame42 = Eigen::Matrix<double, 4, 2>;

struct EigenPlane {
  double magnitude;  // |imaginary part| of the eigenvalue pair
  Frame42 basis;     // g-orthonormal
};

struct SkewDecomposition {
  Mat4 A;
  std::vector<EigenPlane> eigenPairs;  // ascending magnitude
  Frame42 Eplane, Fplane;
  Mat4 chol;  // lower Cholesky factor of g
};

struct FoldedTripleEval {
  Mat4 omega, g, J;
  double detOmega;  // omega^2 / dvol_g
};

inline double pfaffian(const Mat4& W) {
  return W(0, 1) * W(2, 3) - W(0, 2) * W(1, 3) + W(0, 3) * W(1, 2);
}

// With requireSplit false an unseparated spectrum is allowed; the planes are
// then an arbitrary invariant choice.
inline SkewDecomposition skew_endomorphism(const Mat4& gMat, const Mat4& omegaMat, bool requireSplit = true) {
  if ((gMat - gMat.transpose()).norm() > 1e-12 * std::max(1.0, gMat.norm()))
    throw Error(ErrorKind::Input, "metric is not symmetric");
  if ((omegaMat + omegaMat.transpose()).norm() > 1e-12 * std::max(1.0, omegaMat.norm()))
    throw Error(ErrorKind::Input, "2-form is not antisymmetric");
  Eigen::LLT<Mat4> llt(gMat);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Input, "metric is not positive definite");

  SkewDecomposition dec;
  dec.chol = llt.matrixL();
  // omega(u, v) = u^T W v = g(Au, v)  =>  A = g^{-1} W^T
  dec.A = llt.solve(omegaMat.transpose());

  // In g-orthonormal coordinates A becomes the antisymmetric matrix B.
  const Mat4 Linv = dec.chol.inverse();
  const Mat4 B = Linv * omegaMat.transpose() * Linv.transpose();
  Eigen::RealSchur<Mat4> schur(B);
  const Mat4 T = schur.matrixT();
  const Mat4 U = schur.matrixU();
  const Mat4 back = Linv.transpose();  // g-orthonormal coords -> original

  std::vector<EigenPlane> planes;
  std::vector<int> singles;
  for (int i = 0; i < 4;) {
    if (i < 3 && std::abs(T(i + 1, i)) > 0.0) {
      const double mag = std::sqrt(std::abs(T(i, i + 1) * T(i + 1, i)));
      planes.push_back({mag, back * U.middleCols<2>(i)});
      i += 2;
    } else {
      singles.push_back(i);
      i += 1;
    }
  }
  // Real eigenvalues of an antisymmetric matrix are zero; pair them up.
  for (std::size_t k = 0; k + 1 < singles.size(); k += 2) {
    Frame42 f;
    f.col(0) = back * U.col(singles[k]);
    f.col(1) = back * U.col(singles[k + 1]);
    planes.push_back({0.5 * (std::abs(T(singles[k], singles[k])) + std::abs(T(singles[k + 1], singles[k + 1]))), f});
  }
  if (planes.size() != 2) throw Error(ErrorKind::DegenerateSplitting, "could not pair the spectrum into planes");
  std::sort(planes.begin(), planes.end(), [](const auto& a, const auto& b) { return a.magnitude < b.magnitude; });
  if (requireSplit && planes[1].magnitude - planes[0].magnitude < 1e-12)
    throw Error(ErrorKind::DegenerateSplitting, "eigenvalue pairs are not separated");
  dec.eigenPairs = planes;
  dec.Eplane = planes[0].basis;
  dec.Fplane = planes[1].basis;
  return dec;
}

// J = A (-A^2)^{-1/2}. Each 2x2 Schur block of the antisymmetric conjugate B
// is normalized separately, which keeps full relative accuracy on a block
// whose eigenvalue is tiny (a squared-matrix square root would not).
inline FoldedTripleEval polarize(const SkewDecomposition& dec, const Mat4& gMat) {
  const Mat4& L = dec.chol;
  const Mat4 Linv = L.inverse();
  Mat4 B = L.transpose() * dec.A * Linv.transpose();
  B = (0.5 * (B - B.transpose())).eval();
  Eigen::RealSchur<Mat4> schur(B);
  const Mat4 T = schur.matrixT();
  const Mat4 U = schur.matrixU();
  Mat4 Tn = Mat4::Zero();
  double hi = 0.0, lo = INFINITY;
  for (int i = 0; i < 4;) {
    if (i < 3 && std::abs(T(i + 1, i)) > 0.0) {
      const double mag = std::sqrt(std::abs(T(i, i + 1) * T(i + 1, i)));
      hi = std::max(hi, mag);
      lo = std::min(lo, mag);
      const double s = T(i + 1, i) > 0.0 ? 1.0 : -1.0;
      Tn(i + 1, i) = s;
      Tn(i, i + 1) = -s;
      i += 2;
    } else {
      lo = 0.0;
      i += 1;
    }
  }
  if (hi <= 0.0 || lo <= 1e-12 * hi) throw Error(ErrorKind::SingularBlock, "2-form is degenerate on a block");
  Mat4 JB = U * Tn * U.transpose();
  JB = (0.5 * (JB - JB.transpose())).eval();

  FoldedTripleEval t;
  t.J = Linv.transpose() * JB * L.transpose();
  t.omega = gMat * dec.A;
  t.omega = t.omega.transpose().eval();
  t.g = t.omega * t.J;
  t.g = (0.5 * (t.g + t.g.transpose())).eval();
  t.detOmega = 2.0 * pfaffian(t.omega) / std::sqrt(gMat.determinant());
  return t;
}

inline FoldedTripleEval compatible_triple(const Mat4& gMat, const Mat4& omegaMat) {
  return polarize(skew_endomorphism(gMat, omegaMat, false), gMat);
}

// Matrix of j_onesided in the frame (d/dr, R, f, i f) at a fold point.
inline Mat4 onesided_matrix(Side side, const FoldPoint& p) {
  const FoldFrame fr = fold_frame(p);
  const TangentAtFold basis[4] = {fr.K, fr.L, fr.F1, fr.F2};
  Mat4 J;
  for (int c = 0; c < 4; ++c) {
    const TangentAtFold img = j_onesided(side, basis[c]);
    for (int r = 0; r < 4; ++r) J(r, c) = fold_metric(basis[r], img);
  }
  return J;
}

// 2-form along a meridian at signed height x0 in the frame (d/dr, R, f, i f):
// omega = (x0/pi) dr^R + (1/pi) f^(if).
inline Mat4 meridian_omega(double x0) {
  Mat4 W = Mat4::Zero();
  W(0, 1) = x0 / kPi;
  W(1, 0) = -x0 / kPi;
  W(2, 3) = 1.0 / kPi;
  W(3, 2) = -1.0 / kPi;
  return W;
}

struct FoldLimitReport {
  std::vector<double> distances;
  std::vector<double> errors;  // |J(dist) - J_side|
  double rate;                 // log-log slope
  Mat4 nearest;                // J at the smallest distance
};

// Polarized J along a meridian approaching the fold from one side, with the
// metric I + dist * P so the approach is not trivially exact.
inline FoldLimitReport fold_limit_check(Side side, std::span<const double> distances, const Mat4& P,
                                        const FoldPoint& base = FoldPoint()) {
  if (distances.size() < 2) throw Error(ErrorKind::Input, "need at least two meridian samples");
  const Mat4 limit = onesided_matrix(side, base);
  FoldLimitReport rep;
  double best = INFINITY;
  for (double d : distances) {
    if (!(d > 0.0)) throw Error(ErrorKind::Input, "meridian distances must be positive");
    const Mat4 g = Mat4::Identity() + d * P;
    const FoldedTripleEval t = compatible_triple(g, meridian_omega(sign_of(side) * d));
    rep.distances.push_back(d);
    rep.errors.push_back((t.J - limit).norm());
    if (d < best) {
      best = d;
      rep.nearest = t.J;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rep.distances.size());
  for (std::size_t i = 0; i < rep.distances.size(); ++i) {
    const double x = std::log(rep.distances[i]);
    const double y = std::log(std::max(rep.errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

}  // namespace folded
