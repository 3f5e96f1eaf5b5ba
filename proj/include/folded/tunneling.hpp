#pragma once

// Maps from the exterior of a circle (punctured at infinity) into the fold
// S^3: H-holomorphic residuals, asymptotic energy, periods, conjugate pairs
// and their construction, the gap function, and the flat-fold diagonal.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "folded/core_geometry.hpp"
#include "folded/errors.hpp"
#include "folded/harmonic_engine.hpp"
#include "folded/parallel.hpp"
#include "folded/spectral.hpp"

namespace folded {

using FoldMap = std::function<FoldPoint(cplx)>;

inline double alpha_at(const FoldPoint& p, const C2& v) { return herm(p.vec(), v).imag() / kTwoPi; }

// Values and first derivatives of a C^2-valued map on a tensor grid
// (Chebyshev coordinate u, uniform angle theta); du, dth are d/du and d/dtheta.
struct PatchData {
  ChebyshevGrid grid;
  std::size_t M;
  std::vector<C2> v, du, dth;

  std::size_t idx(std::size_t i, std::size_t j) const { return i * M + j; }
};

// Fills du and dth from v: FFT along each ring, Chebyshev across rings.
inline void differentiate_patch(PatchData& p) {
  const std::size_t nr = p.grid.size(), M = p.M;
  p.du.assign(nr * M, C2::Zero());
  p.dth.assign(nr * M, C2::Zero());
  parallel_for(nr, [&](std::size_t i) {
    for (int c = 0; c < 2; ++c) {
      CVec ring(M);
      for (std::size_t j = 0; j < M; ++j) ring[j] = p.v[i * M + j](c);
      CVec d = angular_derivative(std::span<const cplx>(ring));
      for (std::size_t j = 0; j < M; ++j) p.dth[i * M + j](c) = d[j];
    }
  });
  const Eigen::MatrixXd& D = p.grid.diff();
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      C2 acc = C2::Zero();
      for (std::size_t k = 0; k < nr; ++k) acc += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * p.v[k * M + j];
      p.du[i * M + j] = acc;
    }
}

template <class PointFn>
PatchData sample_patch(PointFn&& fn, const ChebyshevGrid& grid, std::size_t M) {
  const std::size_t nr = grid.size();
  PatchData p{grid, M, std::vector<C2>(nr * M), {}, {}};
  parallel_for(nr, [&](std::size_t i) {
    const double u = grid.nodes()[i];
    for (std::size_t j = 0; j < M; ++j) p.v[i * M + j] = fn(u, angle_at(j, M));
  });
  differentiate_patch(p);
  return p;
}

struct TunnelMapSample {
  Domain domain;  // exterior of the fold circle
  FoldMap eval;
  std::vector<FoldPoint> boundary;
  ChebyshevGrid rings;                       // radii from rho outward
  std::vector<std::vector<FoldPoint>> ringValues;
  CharacteristicParam x;
  int multiplicity = 1;                      // signed puncture multiplicity
  std::size_t M = 0;

  double rho() const { return domain.rho; }
};

inline TunnelMapSample make_tunnel_sample(FoldMap eval, double rho, CharacteristicParam x, int multiplicity,
                                          std::size_t M, std::size_t nRings = 32, double outerFactor = 4.0) {
  if (nRings < 3) throw Error(ErrorKind::Resolution, "derivative estimates need at least 3 rings");
  if (!is_power_of_two(M)) throw Error(ErrorKind::Resolution, "sample count must be a power of two");
  TunnelMapSample s{Domain::exterior(rho), std::move(eval), {}, ChebyshevGrid(rho, outerFactor * rho, nRings), {}, x,
                    multiplicity, M};
  s.ringValues.resize(nRings);
  parallel_for(nRings, [&](std::size_t i) {
    const double r = s.rings.nodes()[i];
    auto& row = s.ringValues[i];
    row.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
      row[j] = s.eval(std::polar(r, angle_at(j, M)));
      if (row[j].norm_defect() > 1e-12) throw Error(ErrorKind::Domain, "tunneling map left S^3");
    }
  });
  s.boundary = s.ringValues.front();
  return s;
}

namespace detail {

inline PatchData stored_patch(const TunnelMapSample& v) {
  if (v.rings.size() < 3) throw Error(ErrorKind::Resolution, "derivative estimates need at least 3 rings");
  PatchData p{v.rings, v.M, std::vector<C2>(v.rings.size() * v.M), {}, {}};
  for (std::size_t i = 0; i < v.rings.size(); ++i)
    for (std::size_t j = 0; j < v.M; ++j) p.v[i * v.M + j] = v.ringValues[i][j].vec();
  differentiate_patch(p);
  return p;
}

}  // namespace detail

struct HResidual {
  double Fresidual;
  double Lresidual;
};

// Antilinear part of d(hopf o v) and the exterior derivative of v^*alpha o j.
inline HResidual residual_H(const TunnelMapSample& v) {
  const PatchData P = detail::stored_patch(v);
  const std::size_t nr = P.grid.size(), M = P.M;
  HResidual res{0.0, 0.0};
  std::vector<double> bth(nr * M);  // beta(d/dtheta) = -r alpha(dv/dr)
  std::vector<double> br(nr * M);   // beta(d/dr) = alpha(dv/dtheta) / r
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = P.grid.nodes()[i];
    for (std::size_t j = 0; j < M; ++j) {
      const std::size_t k = P.idx(i, j);
      const FoldPoint p(P.v[k]);
      const Vec3 H = hopf_project(p);
      const Vec3 hr = hopf_differential(p, P.du[k]);
      const Vec3 ht = hopf_differential(p, P.dth[k]);
      res.Fresidual = std::max(res.Fresidual, 0.5 * (hr + H.cross(ht) / r).norm());
      bth[k] = -r * alpha_at(p, P.du[k]);
      br[k] = alpha_at(p, P.dth[k]) / r;
    }
  }
  const Eigen::MatrixXd& D = P.grid.diff();
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = P.grid.nodes()[i];
    RVec ring(M);
    for (std::size_t j = 0; j < M; ++j) ring[j] = br[P.idx(i, j)];
    const RVec dbr = angular_derivative(std::span<const double>(ring));
    for (std::size_t j = 0; j < M; ++j) {
      double drbth = 0.0;
      for (std::size_t k = 0; k < nr; ++k) drbth += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * bth[P.idx(k, j)];
      res.Lresidual = std::max(res.Lresidual, std::abs(drbth - dbr[j]) / r);
    }
  }
  return res;
}

// Samples of v^*alpha o j on d/dtheta along each ring; row 0 is the boundary.
inline std::vector<BoundaryLoopSamples> beta_theta_rings(const TunnelMapSample& v) {
  const PatchData P = detail::stored_patch(v);
  std::vector<BoundaryLoopSamples> out;
  for (std::size_t i = 0; i < P.grid.size(); ++i) {
    const double r = P.grid.nodes()[i];
    CVec vals(P.M);
    for (std::size_t j = 0; j < P.M; ++j) {
      const std::size_t k = P.idx(i, j);
      vals[j] = -r * alpha_at(FoldPoint(P.v[k]), P.du[k]);
    }
    out.emplace_back(std::move(vals), r);
  }
  return out;
}

inline double check_periods(const TunnelMapSample& v) {
  double worst = 0.0;
  for (const auto& ring : beta_theta_rings(v)) worst = std::max(worst, std::abs(boundary_period(ring)));
  return worst;
}

inline std::vector<double> ring_periods(const TunnelMapSample& v) {
  std::vector<double> out;
  for (const auto& ring : beta_theta_rings(v)) out.push_back(boundary_period(ring));
  return out;
}

struct EnergyProfile {
  std::vector<double> radii;  // cylinder coordinate s of each truncation
  std::vector<double> E;
  double decayExponent = 0.0;  // slope of log E_r in s
  double delta = 0.0;
  bool divergent = false;
};

// E_r on the cylinder z = rho exp(2 pi (s + i t)), s in [r, r + length].
inline EnergyProfile asymptotic_energy(const TunnelMapSample& v, double delta, double r, std::size_t nProfile = 8,
                                       double spacing = 0.25, double length = 3.0, std::size_t nNodes = 64,
                                       std::size_t M = 128) {
  if (delta <= 0.0) throw Error(ErrorKind::Input, "weight must be positive");
  const double rho = v.rho();
  const double sEnd = r + length;
  const ChebyshevGrid grid(r, sEnd, nNodes);
  const PatchData P = sample_patch(
      [&](double s, double th) { return v.eval(rho * std::exp(cplx(kTwoPi * s, th))).vec(); }, grid, M);
  const std::size_t nr = grid.size();
  // with t = theta / 2 pi: d/dt = 2 pi d/dtheta
  std::vector<double> bt(nr * M), density(nr, 0.0);
  std::vector<double> as(nr * M), fnorm(nr * M);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const std::size_t k = P.idx(i, j);
      const FoldPoint p(P.v[k]);
      const C2 ds = P.du[k], dt = kTwoPi * P.dth[k];
      as[k] = alpha_at(p, ds);
      bt[k] = alpha_at(p, dt);
      fnorm[k] = contact_project(p, ds).squaredNorm() + contact_project(p, dt).squaredNorm();
    }
  const Eigen::MatrixXd& D = grid.diff();
  for (std::size_t i = 0; i < nr; ++i) {
    RVec ring(M);
    for (std::size_t j = 0; j < M; ++j) ring[j] = bt[P.idx(i, j)];
    const RVec dbt = angular_derivative(std::span<const double>(ring));
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      double dsb = 0.0;
      for (std::size_t q = 0; q < nr; ++q) dsb += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) * bt[P.idx(q, j)];
      const double dtb = kTwoPi * dbt[j];
      const std::size_t k = P.idx(i, j);
      acc += as[k] * as[k] + dsb * dsb + dtb * dtb + fnorm[k];
    }
    density[i] = acc / static_cast<double>(M) * std::exp(delta * grid.nodes()[i]);
  }

  EnergyProfile prof;
  prof.delta = delta;
  const double peak = *std::max_element(density.begin(), density.end());
  prof.divergent = peak > 0.0 && density.back() > 1e-3 * peak;

  // Interpolate the density in s (barycentric on the Lobatto nodes) and
  // integrate each tail with Clenshaw-Curtis.
  const auto& nodes = grid.nodes();
  std::vector<double> bw(nr);
  for (std::size_t j = 0; j < nr; ++j) bw[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == nr - 1) ? 0.5 : 1.0);
  auto interp = [&](double s) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nr; ++j) {
      if (s == nodes[j]) return density[j];
      const double w = bw[j] / (s - nodes[j]);
      num += w * density[j];
      den += w;
    }
    return num / den;
  };
  for (std::size_t k = 0; k < nProfile; ++k) {
    const double a = r + spacing * static_cast<double>(k);
    if (a >= sEnd) break;
    const ChebyshevGrid sub(a, sEnd, nNodes);
    double e = 0.0;
    for (std::size_t j = 0; j < sub.size(); ++j) e += sub.weights()[j] * interp(sub.nodes()[j]);
    prof.radii.push_back(a);
    prof.E.push_back(std::max(e, 0.0));
  }
  // least-squares slope of log E over the profile
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t k = 0; k < prof.E.size(); ++k) {
    if (prof.E[k] <= 1e-300) continue;
    const double y = std::log(prof.E[k]);
    sx += prof.radii[k];
    sy += y;
    sxx += prof.radii[k] * prof.radii[k];
    sxy += prof.radii[k] * y;
    n += 1;
  }
  prof.decayExponent = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return prof;
}

// Samples of u^*alpha on d/dtheta along a fold-valued boundary loop.
inline BoundaryLoopSamples alpha_tangent(std::span<const FoldPoint> loop, double radius) {
  const std::size_t M = loop.size();
  CVec z(M), w(M);
  for (std::size_t j = 0; j < M; ++j) {
    z[j] = loop[j].z;
    w[j] = loop[j].w;
  }
  const CVec dz = angular_derivative(std::span<const cplx>(z)), dw = angular_derivative(std::span<const cplx>(w));
  CVec out(M);
  for (std::size_t j = 0; j < M; ++j) out[j] = alpha_at(loop[j], C2(dz[j], dw[j]));
  return BoundaryLoopSamples(std::move(out), radius);
}

// a = -u_-^*alpha / u_+^*alpha on a common tangent vector of the domain fold.
inline BoundaryLoopSamples gap_function(const BoundaryLoopSamples& uPlusAlpha, const BoundaryLoopSamples& uMinusAlpha) {
  if (uPlusAlpha.size() != uMinusAlpha.size()) throw Error(ErrorKind::Input, "loops differ in length");
  CVec a(uPlusAlpha.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double den = uPlusAlpha.values[j].real();
    if (std::abs(den) < 1e-10) throw Error(ErrorKind::NonTransverse, "u+^*alpha vanishes on the fold");
    a[j] = -uMinusAlpha.values[j].real() / den;
    if (a[j].real() <= 0.0)
      throw Error(ErrorKind::SignViolation, "u+^*alpha and u-^*alpha must have opposite signs");
  }
  return BoundaryLoopSamples(std::move(a), uPlusAlpha.radius);
}

struct ConjugatePair {
  TunnelMapSample vPlus, vMinus;
  CharacteristicParam x;
  BoundaryLoopSamples gFunction;  // exp(2 pi i phase) on the boundary, v- = phase * v+
  BoundaryLoopSamples fScale;     // conformal factor, 1 on the boundary
};

struct ConjugateReport {
  double omegaDefect = 0.0;      // |v+^*omega - f v-^*omega|
  double fBoundaryDefect = 0.0;  // |f - 1| on the boundary
  double fMin = 1.0;
  double lambdaSup = 0.0;        // |lambda(d/dtheta)| on the boundary
  double markerDefect = 0.0;     // |x(t+ + t-) - x(0)|
  double baseDefect = 0.0;       // |hopf(v+) - hopf(v-)|
  double eigenDirectionDefect = 0.0;
  bool eigenProxyApplicable = false;

  double worst() const {
    return std::max({omegaDefect, fBoundaryDefect, lambdaSup, markerDefect, baseDefect, eigenDirectionDefect,
                     fMin < 0.0 ? -fMin : 0.0});
  }
  bool pass(double tol) const { return worst() < tol; }
};

// Parameter of the limit point of v along direction e^{i phi} at the puncture.
inline double puncture_param(const TunnelMapSample& v, double phi, double farFactor = 1e10) {
  const FoldPoint p = v.eval(std::polar(farFactor * v.rho(), phi));
  return std::arg(p.z / v.x.m) / kTwoPi;
}

// Leading Fourier coefficient of w conj(z)/|z| on the outer ring.
inline cplx leading_transverse_mode(const TunnelMapSample& v) {
  const auto& ring = v.ringValues.back();
  CVec q(ring.size());
  for (std::size_t j = 0; j < ring.size(); ++j) q[j] = ring[j].w * std::conj(ring[j].z) / std::max(std::abs(ring[j].z), 1e-300);
  const CVec c = fourier_coefficients(std::span<const cplx>(q));
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (std::abs(c[k]) > std::abs(c[best])) best = k;
  return c[best];
}

inline ConjugateReport check_conjugate(const ConjugatePair& pair, std::size_t nDirections = 8) {
  const TunnelMapSample& vp = pair.vPlus;
  const TunnelMapSample& vm = pair.vMinus;
  if (vp.M != vm.M || vp.rings.size() != vm.rings.size())
    throw Error(ErrorKind::Input, "conjugate maps must share a grid");
  ConjugateReport rep;
  const PatchData P = detail::stored_patch(vp), Q = detail::stored_patch(vm);
  for (std::size_t i = 0; i < P.grid.size(); ++i)
    for (std::size_t j = 0; j < P.M; ++j) {
      const std::size_t k = P.idx(i, j);
      const double f = pair.fScale.values.empty() ? 1.0 : pair.fScale.values[j % pair.fScale.size()].real();
      const double wp = omega0(contact_project(FoldPoint(P.v[k]), P.du[k]), contact_project(FoldPoint(P.v[k]), P.dth[k])) / kPi;
      const double wm = omega0(contact_project(FoldPoint(Q.v[k]), Q.du[k]), contact_project(FoldPoint(Q.v[k]), Q.dth[k])) / kPi;
      rep.omegaDefect = std::max(rep.omegaDefect, std::abs(wp - f * wm));
      rep.baseDefect =
          std::max(rep.baseDefect, (hopf_project(FoldPoint(P.v[k])) - hopf_project(FoldPoint(Q.v[k]))).norm());
    }
  for (const auto& f : pair.fScale.values) {
    rep.fBoundaryDefect = std::max(rep.fBoundaryDefect, std::abs(f.real() - 1.0));
    rep.fMin = std::min(rep.fMin, f.real());
  }
  const auto bp = beta_theta_rings(vp), bm = beta_theta_rings(vm);
  for (std::size_t j = 0; j < vp.M; ++j)
    rep.lambdaSup = std::max(rep.lambdaSup, std::abs(bp[0].values[j].real() + bm[0].values[j].real()));
  for (std::size_t k = 0; k < nDirections; ++k) {
    const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(nDirections);
    const double t = puncture_param(vp, phi) + puncture_param(vm, phi);
    rep.markerDefect = std::max(rep.markerDefect, std::abs(std::exp(cplx(0.0, kTwoPi * t)) - 1.0));
  }
  const cplx ap = leading_transverse_mode(vp), am = leading_transverse_mode(vm);
  if (std::abs(ap) > 1e-12 && std::abs(am) > 1e-12) {
    rep.eigenProxyApplicable = true;
    rep.eigenDirectionDefect = std::abs(ap / std::abs(ap) - am / std::abs(am));
  }
  return rep;
}

// Builds v- = exp(2 pi i phase) v+ where the phase is -(d/pi) arg z plus the
// harmonic solution of the Neumann problem with data -2 v+^*alpha o j, plus
// the constant fixed by the marker law.
struct PartnerPhase {
  LaurentField h;
  double constant;
  int multiplicity;

  double operator()(cplx z) const {
    return -(static_cast<double>(multiplicity) / kPi) * std::arg(z) + h.harmonic(z) + constant;
  }
};

inline PartnerPhase partner_phase(const TunnelMapSample& vPlus) {
  const auto beta = beta_theta_rings(vPlus).front();
  const double period = boundary_period(beta);
  if (std::abs(period) > 1e-9) throw Error(ErrorKind::PeriodObstruction, "v^*alpha o j has a nonzero period");
  BoundaryLoopSamples data = beta;
  for (auto& x : data.values) x = -2.0 * x.real();
  // the data has zero mean up to the period check; remove the roundoff
  double mean = 0.0;
  for (auto& x : data.values) mean += x.real();
  mean /= static_cast<double>(data.size());
  for (auto& x : data.values) x -= mean;
  PartnerPhase ph{solve_neumann_vanishing(data, vPlus.domain), 0.0, vPlus.multiplicity};
  ph.constant = -2.0 * puncture_param(vPlus, 0.0);
  return ph;
}

inline TunnelMapSample conjugate_partner(const TunnelMapSample& vPlus, const CharacteristicParam& x) {
  const PartnerPhase ph = partner_phase(vPlus);
  FoldMap base = vPlus.eval;
  FoldMap eval = [base, ph](cplx z) { return reeb_flow(base(z), ph(z)); };
  TunnelMapSample out = make_tunnel_sample(eval, vPlus.rho(), x, -vPlus.multiplicity, vPlus.M, vPlus.rings.size(),
                                           vPlus.rings.b() / vPlus.rho());
  return out;
}

inline ConjugatePair make_conjugate_pair(const TunnelMapSample& vPlus, const TunnelMapSample& vMinus) {
  ConjugatePair pair{vPlus, vMinus, vPlus.x, {}, {}};
  CVec g(vPlus.M), f(vPlus.M, 1.0);
  for (std::size_t j = 0; j < vPlus.M; ++j) {
    const FoldPoint a = vPlus.boundary[j], b = vMinus.boundary[j];
    g[j] = herm(a.vec(), b.vec());  // unit phase when b is a flow of a
  }
  pair.gFunction = BoundaryLoopSamples(std::move(g), vPlus.rho());
  pair.fScale = BoundaryLoopSamples(std::move(f), vPlus.rho());
  return pair;
}

// Folded diagonal of the flat fold S^1 x T^2:
// Phi_{theta0}(xi, z) = (e^{4 pi i theta0} conj(xi), z).
struct FlatFoldPoint {
  cplx xi;
  cplx t1, t2;
};

inline FlatFoldPoint flat_fold_map(double theta0, const FlatFoldPoint& p) {
  const double phase = std::fmod(2.0 * theta0, 1.0);
  return FlatFoldPoint{std::exp(cplx(0.0, kTwoPi * phase)) * std::conj(p.xi), p.t1, p.t2};
}

struct FlatFoldReport {
  double graphResidual = 0.0;       // Phi(e^{2 pi i (theta0 + theta)}) vs e^{2 pi i (theta0 - theta)}
  double halfPeriodResidual = 0.0;  // Phi_{theta0} vs Phi_{theta0 + 1/2}
  double torusResidual = 0.0;       // torus factor unchanged
};

inline FlatFoldReport flat_fold_diagonal_check(double theta0, std::span<const FlatFoldPoint> samples) {
  FlatFoldReport rep;
  for (const auto& s : samples) {
    const double theta = std::arg(s.xi) / kTwoPi - theta0;
    const FlatFoldPoint a = flat_fold_map(theta0, s);
    const FlatFoldPoint b = flat_fold_map(theta0 + 0.5, s);
    rep.graphResidual = std::max(rep.graphResidual, std::abs(a.xi - std::exp(cplx(0.0, kTwoPi * (theta0 - theta)))));
    rep.halfPeriodResidual =
        std::max({rep.halfPeriodResidual, std::abs(a.xi - b.xi), std::abs(a.t1 - b.t1), std::abs(a.t2 - b.t2)});
    rep.torusResidual = std::max({rep.torusResidual, std::abs(a.t1 - s.t1), std::abs(a.t2 - s.t2)});
  }
  return rep;
}

}  // namespace folded
