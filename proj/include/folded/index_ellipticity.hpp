#pragma once

// Maslov and Fredholm indices, the boundary operator B of the folded
// diagonal, its principal symbol and the ellipticity certificate.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "folded/errors.hpp"
#include "folded/harmonic_engine.hpp"
#include "folded/moduli_s4.hpp"
#include "folded/parallel.hpp"
#include "folded/tunneling.hpp"

namespace folded {

using Frame2 = Eigen::Matrix2cd;

struct TotallyRealLoop {
  std::vector<Frame2> frames;  // columns span a totally real plane in C^2

  std::size_t size() const { return frames.size(); }
};

namespace detail {

// Real Gram-Schmidt of the two columns viewed in R^4.
inline Frame2 real_orthonormalize(const Frame2& V) {
  Frame2 Q;
  const C2 a = V.col(0);
  const double na = a.norm();
  if (na == 0.0) throw Error(ErrorKind::Domain, "degenerate frame");
  Q.col(0) = a / na;
  C2 b = V.col(1);
  b -= herm(Q.col(0), b).real() * Q.col(0);
  const double nb = b.norm();
  if (nb == 0.0) throw Error(ErrorKind::Domain, "degenerate frame");
  Q.col(1) = b / nb;
  return Q;
}

}  // namespace detail

// |det| of the real-orthonormalized frame: product of the sines of the
// principal angles between L and iL.
inline double totally_real_margin(const Frame2& V) {
  try {
    return std::abs(detail::real_orthonormalize(V).determinant());
  } catch (const Error&) {
    return 0.0;
  }
}

inline int maslov_index(const TotallyRealLoop& loop, double margin = 1e-6) {
  const std::size_t M = loop.size();
  if (M < 3) throw Error(ErrorKind::Resolution, "loop needs at least 3 samples");
  std::vector<cplx> sq(M);
  for (std::size_t j = 0; j < M; ++j) {
    const Frame2 Q = detail::real_orthonormalize(loop.frames[j]);
    const cplx d = Q.determinant();
    if (std::abs(d) <= margin) throw Error(ErrorKind::Domain, "plane is not totally real");
    sq[j] = (d * d) / std::norm(d);
  }
  double turn = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double step = std::arg(sq[(j + 1) % M] / sq[j]);
    if (std::abs(step) > 0.5 * kPi) throw Error(ErrorKind::Resolution, "loop under-sampled for the winding count");
    turn += step;
  }
  return static_cast<int>(std::lround(turn / kTwoPi));
}

inline int fredholm_index(int muPlus, int muMinus, int chi) { return muPlus + muMinus + 2 * chi; }
inline int reduced_index(int muPlus, int muMinus, int chi) { return muPlus + muMinus - chi + 1; }

struct BoundaryLoops {
  TotallyRealLoop plus, minus;
  bool perturbed = false;  // c = 0 has pi_F du = 0 on sigma; a nearby member was used
};

namespace detail {

// [y, pi_F dY/dtheta] along a chart loop y(e^{i theta}) traversed counterclockwise.
inline TotallyRealLoop chart_loop(const std::function<C2(cplx)>& chart, double radius, std::size_t M) {
  std::vector<C2> y(M);
  for (std::size_t j = 0; j < M; ++j) y[j] = chart(std::polar(radius, angle_at(j, M)));
  std::vector<C2> dy(M);
  for (int c = 0; c < 2; ++c) {
    CVec ring(M);
    for (std::size_t j = 0; j < M; ++j) ring[j] = y[j](c);
    const CVec d = angular_derivative(std::span<const cplx>(ring));
    for (std::size_t j = 0; j < M; ++j) dy[j](c) = d[j];
  }
  TotallyRealLoop L;
  L.frames.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    const C2 f = dy[j] - herm(y[j], dy[j]) / y[j].squaredNorm() * y[j];
    L.frames[j].col(0) = y[j];
    L.frames[j].col(1) = f;
  }
  return L;
}

inline bool loop_ok(const TotallyRealLoop& L) {
  for (const auto& F : L.frames)
    if (totally_real_margin(F) <= 1e-6) return false;
  return true;
}

}  // namespace detail

// Each side is traversed as the boundary of its own disk: z for the upper
// domain, zeta = sigmaRadius / z for the lower one.
inline BoundaryLoops boundary_condition_loops(const FoldedMapBundle& b) {
  BoundaryLoops out;
  out.plus = detail::chart_loop(b.uPlusChart, b.sigmaRadius, b.M);
  out.minus = detail::chart_loop(b.uMinusChart, 1.0, b.M);
  if (detail::loop_ok(out.plus) && detail::loop_ok(out.minus)) return out;
  if (!b.param) throw Error(ErrorKind::NonImmersed, "pi_F du vanishes along the fold");
  // the boundary condition bundle is locally constant in c; use |c| = 1e-3
  const cplx dir = std::abs(b.param->c) > 0.0 ? b.param->c / std::abs(b.param->c) : cplx(1.0);
  const ModuliParam p{1e-3 * dir, b.param->m};
  const double rho = p.rho();
  const cplx c = p.c, m = p.m;
  out.plus = detail::chart_loop([=](cplx z) { return C2(rho * m * z, m * c); }, 1.0, b.M);
  out.minus = detail::chart_loop([=](cplx z) { return C2(rho * m * z, m * c * z * z); }, 1.0, b.M);
  out.perturbed = true;
  return out;
}

// Sections along sigma: F-part as a complex coordinate in the unit contact
// frame, E-part as coefficients of d/dr and R.
struct BoundarySectionEF {
  CVec xiF;
  RVec zetaK, zetaL;

  static BoundarySectionEF zero(std::size_t M) { return {CVec(M, 0.0), RVec(M, 0.0), RVec(M, 0.0)}; }
  std::size_t size() const { return xiF.size(); }
};

struct BOperatorData {
  double radius = 1.0;  // radius of sigma in the coordinate of S
  CVec AF;              // A^F as a complex factor between the contact frames of v+ and v-
  RVec a;               // gap function
  RVec fChi, fJChi;     // f on the unit contact frame chi of v+ and on J chi
  // Tangential data of v+ and v- along sigma, kept for gauge checks.
  CVec xPlus, xMinus;        // contact coordinates of d/dtheta v
  RVec alphaPlus, alphaMinus;

  std::size_t size() const { return a.size(); }
  void validate() const {
    const std::size_t M = a.size();
    if (AF.size() != M || fChi.size() != M || fJChi.size() != M) throw Error(ErrorKind::Input, "sample count mismatch");
    for (std::size_t j = 0; j < M; ++j) {
      if (!(a[j] > 0.0)) throw Error(ErrorKind::SignViolation, "gap function must be positive");
      if (std::abs(AF[j]) == 0.0) throw Error(ErrorKind::Input, "A^F vanishes");
    }
  }
};

namespace detail {

struct SigmaTangents {
  CVec x, xr;  // contact coordinates of d/dtheta v and d/dr v
  RVec alphaTh, alphaR;
};

inline SigmaTangents sigma_tangents(const TunnelMapSample& v) {
  const PatchData P = stored_patch(v);
  SigmaTangents t{CVec(v.M), CVec(v.M), RVec(v.M), RVec(v.M)};
  for (std::size_t j = 0; j < v.M; ++j) {
    const FoldPoint p(P.v[P.idx(0, j)]);
    t.x[j] = contact_coordinate(p, P.dth[P.idx(0, j)]);
    t.xr[j] = contact_coordinate(p, P.du[P.idx(0, j)]);
    t.alphaTh[j] = alpha_at(p, P.dth[P.idx(0, j)]);
    t.alphaR[j] = alpha_at(p, P.du[P.idx(0, j)]);
  }
  return t;
}

}  // namespace detail

// f = lambda o (pi_F dv+)^{-1} with lambda = (v+^*alpha + v-^*alpha) o j.
// pi_F dv+ is complex linear, so the preimage of the contact coordinate s is
// Re(s/x) d/dtheta + Im(s/x) j d/dtheta, and j d/dtheta = -r d/dr.
inline BOperatorData make_boperator_data(const FoldedMapBundle& b) {
  const auto& vp = b.vPair.vPlus;
  const auto& vm = b.vPair.vMinus;
  const std::size_t M = vp.M;
  const double r = vp.rho();
  const auto tp = detail::sigma_tangents(vp), tm = detail::sigma_tangents(vm);
  const auto bp = beta_theta_rings(vp).front(), bm = beta_theta_rings(vm).front();

  BOperatorData d;
  d.radius = r;
  d.AF.resize(M);
  d.fChi.assign(M, 0.0);
  d.fJChi.assign(M, 0.0);
  d.xPlus = tp.x;
  d.xMinus = tm.x;
  d.alphaPlus = tp.alphaTh;
  d.alphaMinus = tm.alphaTh;
  const auto gap = bundle_gap(b);
  d.a = gap.real();
  for (std::size_t j = 0; j < M; ++j) {
    const cplx g = b.vPair.gFunction.values[j];
    d.AF[j] = g * g / std::norm(g);
    const double lamTh = bp.values[j].real() + bm.values[j].real();
    const double lamR = (tp.alphaTh[j] + tm.alphaTh[j]) / r;
    // at c = 0 pi_F dv+ vanishes on sigma; lambda does too and f is set to 0
    if (std::abs(tp.x[j]) < 1e-12) continue;
    auto f_of = [&](cplx s) {
      const cplx q = s / tp.x[j];
      return q.real() * lamTh - q.imag() * r * lamR;
    };
    d.fChi[j] = f_of(1.0);
    d.fJChi[j] = f_of(cplx(0.0, 1.0));
  }
  return d;
}

class BOperator {
 public:
  explicit BOperator(BOperatorData data) : d_(std::move(data)) { d_.validate(); }

  const BOperatorData& data() const { return d_; }

  // f applied to the vector with contact coordinate s, and to J of it.
  double f_at(std::size_t j, cplx s) const { return s.real() * d_.fChi[j] + s.imag() * d_.fJChi[j]; }
  double fJ_at(std::size_t j, cplx s) const { return -s.imag() * d_.fChi[j] + s.real() * d_.fJChi[j]; }

  // Conjugate trace of the bounded harmonic extension; vanishes at the puncture.
  RVec conjugate_trace(const RVec& u) const {
    bool zero = true;
    for (double x : u) zero = zero && x == 0.0;
    if (zero) return RVec(u.size(), 0.0);
    return solve_Qtilde(BoundaryLoopSamples(u, d_.radius)).gBoundary.real();
  }

  BoundarySectionEF apply(const BoundarySectionEF& xi) const {
    const std::size_t M = d_.size();
    if (xi.size() != M || xi.zetaK.size() != M || xi.zetaL.size() != M)
      throw Error(ErrorKind::Input, "section does not match the sigma grid");
    BoundarySectionEF out = BoundarySectionEF::zero(M);
    RVec cIn(M);
    for (std::size_t j = 0; j < M; ++j) cIn[j] = (1.0 - d_.a[j]) * xi.zetaK[j] - f_at(j, xi.xiF[j]);
    const RVec G = conjugate_trace(cIn);
    for (std::size_t j = 0; j < M; ++j) {
      out.xiF[j] = d_.AF[j] * xi.xiF[j];
      out.zetaK[j] = d_.a[j] * xi.zetaK[j];
      out.zetaL[j] = -xi.zetaL[j] - fJ_at(j, xi.xiF[j]) + G[j];
    }
    return out;
  }

 private:
  BOperatorData d_;
};

inline BOperator build_B(const BOperatorData& data) { return BOperator(data); }

inline double section_distance(const BoundarySectionEF& x, const BoundarySectionEF& y) {
  double r = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    r = std::max({r, std::abs(x.xiF[j] - y.xiF[j]), std::abs(x.zetaK[j] - y.zetaK[j]),
                  std::abs(x.zetaL[j] - y.zetaL[j])});
  return r;
}

// The deformation xi- of the conjugate pair built directly: A^F from the ratio
// of tangent vectors, f by inverting pi_F dv+ on the (d/dtheta, d/dr) frame,
// g from the Neumann problem, then
// xi- = A^F(pi_F xi) - (f(J pi_F xi) + alpha(xi) + g) R.
inline BoundarySectionEF deformation_trace(const ConjugatePair& pair, const BoundarySectionEF& xiHat) {
  const auto& vp = pair.vPlus;
  const auto& vm = pair.vMinus;
  const std::size_t M = vp.M;
  if (xiHat.size() != M) throw Error(ErrorKind::Input, "section does not match the sigma grid");
  for (double k : xiHat.zetaK)
    if (k != 0.0) throw Error(ErrorKind::Input, "section must be tangent to the fold");
  const double r = vp.rho();
  const auto tp = detail::sigma_tangents(vp), tm = detail::sigma_tangents(vm);

  auto lambda_of = [&](std::size_t j, double aTh, double aR) {
    // lambda(d/dtheta) = -r sum alpha(dv/dr), lambda(d/dr) = sum alpha(dv/dtheta) / r
    const double lTh = -r * (tp.alphaR[j] + tm.alphaR[j]);
    const double lR = (tp.alphaTh[j] + tm.alphaTh[j]) / r;
    return aTh * lTh + aR * lR;
  };
  auto f_direct = [&](std::size_t j, cplx s) {
    if (s == cplx(0.0)) return 0.0;
    Eigen::Matrix2d A;
    A << tp.x[j].real(), tp.xr[j].real(), tp.x[j].imag(), tp.xr[j].imag();
    const Eigen::Vector2d eta = A.partialPivLu().solve(Eigen::Vector2d(s.real(), s.imag()));
    return lambda_of(j, eta(0), eta(1));
  };

  RVec fx(M), fJx(M);
  for (std::size_t j = 0; j < M; ++j) {
    fx[j] = f_direct(j, xiHat.xiF[j]);
    fJx[j] = f_direct(j, cplx(0.0, 1.0) * xiHat.xiF[j]);
  }
  RVec g(M, 0.0);
  const RVec dfx = angular_derivative(std::span<const double>(fx));
  // a constant f(xi) has no Neumann data; its derivative is pure roundoff
  double scale = 1.0, slope = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    scale = std::max(scale, std::abs(fx[j]));
    slope = std::max(slope, std::abs(dfx[j]));
  }
  if (slope > 1e-9 * scale) {
    CVec data(M);
    for (std::size_t j = 0; j < M; ++j) data[j] = dfx[j];
    const LaurentField gf = solve_neumann_vanishing(BoundaryLoopSamples(data, r), Domain::exterior(r));
    g = gf.trace(r, M).real();
  }
  BoundarySectionEF out = BoundarySectionEF::zero(M);
  for (std::size_t j = 0; j < M; ++j) {
    out.xiF[j] = tm.x[j] / tp.x[j] * xiHat.xiF[j];
    out.zetaL[j] = -(fJx[j] + xiHat.zetaL[j] + g[j]);
  }
  return out;
}

inline double graph_check_dDeltaZ(const ConjugatePair& pair, const BOperator& B, const BoundarySectionEF& xiHat) {
  return section_distance(B.apply(xiHat), deformation_trace(pair, xiHat));
}

// Principal symbol on T_C = C^4 in the real basis (chi, J chi, d/dr, R).
using SymbolMatrix = Eigen::Matrix4cd;

struct SymbolSample {
  cplx AF = 1.0;
  double a = 1.0;
  double fChi = 0.0, fJChi = 0.0;
};

namespace detail {

inline Eigen::Matrix4d J_matrix(int side) {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J(1, 0) = 1.0;
  J(0, 1) = -1.0;
  J(3, 2) = side;
  J(2, 3) = -side;
  return J;
}

}  // namespace detail

// b = A^F + A^E (id - f_C) + c((1 - a) id_E - f_C), with
// c = -(id -+ i J-) pi_K A^E for the two covector signs.
inline SymbolMatrix principal_symbol_B(const SymbolSample& s, int covectorSign = 1) {
  const cplx I(0.0, 1.0);
  const Eigen::Matrix4d Jm = detail::J_matrix(-1);
  Eigen::Matrix4d AE = Eigen::Matrix4d::Zero();
  AE(2, 2) = 1.0;
  AE(3, 3) = -1.0;
  Eigen::Matrix4d AFm = Eigen::Matrix4d::Zero();
  AFm(0, 0) = s.AF.real();
  AFm(0, 1) = -s.AF.imag();
  AFm(1, 0) = s.AF.imag();
  AFm(1, 1) = s.AF.real();
  Eigen::Matrix4d fC = Eigen::Matrix4d::Zero();
  fC(2, 0) = s.fChi;
  fC(3, 0) = -s.fJChi;
  fC(2, 1) = s.fJChi;
  fC(3, 1) = s.fChi;
  Eigen::Matrix4d idE = Eigen::Matrix4d::Zero();
  idE(2, 2) = idE(3, 3) = 1.0;
  Eigen::Matrix4d piK = Eigen::Matrix4d::Zero();
  piK(2, 2) = 1.0;
  const SymbolMatrix c =
      -(SymbolMatrix::Identity() - double(covectorSign) * I * Jm.cast<cplx>()) * (piK * AE).cast<cplx>();
  const Eigen::Matrix4d base = AFm + AE * (idE - fC);
  return base.cast<cplx>() + c * ((1.0 - s.a) * idE - fC).cast<cplx>();
}

// Spanning sets of range(p): the +i eigenspace of J+ and the -i eigenspace of
// J- (swapped for the other covector sign).
inline Eigen::Matrix<cplx, 4, 2> eigen_basis(int side, cplx eig) {
  const Eigen::Matrix4cd J = detail::J_matrix(side).cast<cplx>();
  Eigen::Matrix<cplx, 4, 2> B;
  Eigen::Vector4cd e0 = Eigen::Vector4cd::Zero(), e2 = Eigen::Vector4cd::Zero();
  e0(0) = 1.0;
  e2(2) = 1.0;
  // J^2 = -1, so (id + J / eig) / 2 projects onto the eig eigenspace
  const Eigen::Matrix4cd P = 0.5 * (Eigen::Matrix4cd::Identity() + J / eig);
  B.col(0) = (P * e0).normalized();
  B.col(1) = (P * e2).normalized();
  return B;
}

inline double symbol_sigma_min(const SymbolSample& s, int covectorSign) {
  const cplx I(0.0, 1.0);
  const auto W = eigen_basis(1, double(covectorSign) * I);
  const auto Z = eigen_basis(-1, -double(covectorSign) * I);
  Eigen::Matrix4cd R;
  R.leftCols<2>() = -principal_symbol_B(s, covectorSign) * W;
  R.rightCols<2>() = Z;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(R);
  return svd.singularValues().minCoeff();
}

struct EllipticityReport {
  double sigmaMin = INFINITY;
  std::size_t location = 0;
  double threshold = 1e-8;
  bool pass() const { return sigmaMin > threshold; }
};

inline EllipticityReport check_ellipticity(const BOperatorData& d, double threshold = Tolerances{}.ellipticity) {
  const std::size_t M = d.size();
  std::vector<double> mins(M);
  parallel_for(M, [&](std::size_t j) {
    const SymbolSample s{d.AF[j], d.a[j], d.fChi[j], d.fJChi[j]};
    mins[j] = std::min(symbol_sigma_min(s, 1), symbol_sigma_min(s, -1));
  });
  EllipticityReport rep;
  rep.threshold = threshold;
  for (std::size_t j = 0; j < M; ++j)
    if (mins[j] < rep.sigmaMin) {
      rep.sigmaMin = mins[j];
      rep.location = j;
    }
  return rep;
}

inline double symbol_homotopy_bt(std::span<const double> a, std::span<const double> tGrid) {
  double mn = INFINITY;
  for (double t : tGrid)
    for (double x : a) mn = std::min(mn, std::abs(1.0 + x * t - t));
  return mn;
}

inline std::vector<double> unit_grid(std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = static_cast<double>(k) / static_cast<double>(n);
  return t;
}

struct Certificate {
  double sigmaMin = 0.0, aMin = 0.0, homotopyMin = 0.0;
  int maslovPlus = 0, maslovMinus = 0, index = 0, reducedIndex = 0;
  std::size_t failLocation = 0;
  bool loopsPerturbed = false;
  bool pass = false;
};

inline Certificate make_certificate(const BOperatorData& d, const BoundaryLoops& loops, int chi = 2) {
  Certificate c;
  const auto rep = check_ellipticity(d);
  c.sigmaMin = rep.sigmaMin;
  c.failLocation = rep.location;
  c.aMin = *std::min_element(d.a.begin(), d.a.end());
  const auto t = unit_grid(64);
  c.homotopyMin = symbol_homotopy_bt(d.a, t);
  c.maslovPlus = maslov_index(loops.plus);
  c.maslovMinus = maslov_index(loops.minus);
  c.index = fredholm_index(c.maslovPlus, c.maslovMinus, chi);
  c.reducedIndex = reduced_index(c.maslovPlus, c.maslovMinus, chi);
  c.loopsPerturbed = loops.perturbed;
  c.pass = rep.pass() && c.aMin > 0.0 && c.homotopyMin > 0.0;
  return c;
}

}  // namespace folded
