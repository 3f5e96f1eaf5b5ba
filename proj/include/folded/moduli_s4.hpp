#pragma once

// Explicit folded holomorphic maps into S^4: the degree-1 family, the
// degree-d construction from a rational curve, verification, energies,
// compactification and the Hopf reduction of the family.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "folded/core_geometry.hpp"
#include "folded/errors.hpp"
#include "folded/harmonic_engine.hpp"
#include "folded/tunneling.hpp"

namespace folded {

struct ModuliParam {
  cplx c{0.0, 0.0};
  cplx m{1.0, 0.0};

  void validate() const {
    if (!(std::abs(c) < 1.0)) throw Error(ErrorKind::Input, "|c| must be < 1");
    if (std::abs(std::abs(m) - 1.0) > 1e-12) throw Error(ErrorKind::Input, "|m| must be 1");
  }
  double rho() const { return std::sqrt(1.0 - std::norm(c)); }
};

// w(z) = (p(z), q(z)), coefficients in ascending powers.
struct CurveInput {
  CVec p, q;
  cplx m{1.0, 0.0};

  static int degree_of(const CVec& a) {
    for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k)
      if (a[static_cast<std::size_t>(k)] != cplx(0.0)) return k;
    return -1;
  }
  int degree() const { return std::max(degree_of(p), degree_of(q)); }

  static cplx horner(const CVec& a, cplx z) {
    cplx s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * z + *it;
    return s;
  }
  C2 eval(cplx z) const { return C2(horner(p, z), horner(q, z)); }
};

struct HomologyLabel {
  CharacteristicParam x;
  int d = 1;
};

struct EnergyRecord {
  double uPlus = 0.0, uMinus = 0.0, vPlus = 0.0, vMinus = 0.0;
  double total() const { return uPlus + uMinus; }
};

struct FoldedMapBundle {
  std::string kind;
  std::size_t M = 512;
  double sigmaRadius = 1.0;  // the domain fold is |z| = sigmaRadius
  double psiScale = 1.0;     // psi(z) = psiScale * z identifies sigma with the boundary of S
  std::function<C2(cplx)> uPlusChart;   // ball chart of u+, |z| <= sigmaRadius
  std::function<C2(cplx)> uMinusChart;  // ball chart of u-, in zeta = sigmaRadius / z, |zeta| <= 1
  std::vector<FoldPoint> uPlusBoundary, uMinusBoundary;  // at z_j = sigmaRadius e^{i theta_j}
  ConjugatePair vPair;
  HomologyLabel labelPlus, labelMinus;
  EnergyRecord energy;
  C2 trackingPoint = C2::Zero();
  double maxLowerChartNorm = 0.0;
  std::optional<ModuliParam> param;
  std::optional<CurveInput> curve;

  Point4Sphere uPlus(cplx z) const { return embed_hemisphere(Side::Plus, uPlusChart(z)); }
  Point4Sphere uMinusZeta(cplx zeta) const { return embed_hemisphere(Side::Minus, uMinusChart(zeta)); }
};

inline std::size_t energy_rings() { return 128; }

inline EnergyRecord bundle_energies(const FoldedMapBundle& b) {
  const std::size_t nr = energy_rings(), M = b.M;
  EnergyRecord e;
  e.uPlus = omega_energy(sample_polar(
      [&](double r, double t) { return project_equator(b.uPlus(std::polar(r, t))); }, 0.0, b.sigmaRadius, nr, M));
  e.uMinus = omega_energy(sample_polar(
      [&](double r, double t) { return project_equator(b.uMinusZeta(std::polar(r, t))); }, 0.0, 1.0, nr, M));
  // tunneling maps in the disk coordinate zeta = rho_S / z; the puncture is zeta = 0
  const double rhoS = b.vPair.vPlus.rho();
  auto vdisk = [&](const TunnelMapSample& v) {
    return omega_energy(sample_polar(
        [&](double r, double t) {
          if (r == 0.0) {
            // ring of limit points; its angular derivative does not enter the energy
            return v.eval(std::polar(1e12 * rhoS, -t)).vec();
          }
          return v.eval(rhoS / std::polar(r, t)).vec();
        },
        0.0, 1.0, nr, M));
  };
  e.vPlus = vdisk(b.vPair.vPlus);
  e.vMinus = vdisk(b.vPair.vMinus);
  return e;
}

namespace detail {

inline std::vector<FoldPoint> chart_boundary(const std::function<C2(cplx)>& chart, double radius, std::size_t M,
                                             bool zetaChart) {
  std::vector<FoldPoint> out(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double t = angle_at(j, M);
    // the lower chart is in zeta = radius / z, so z = radius e^{it} is zeta = e^{-it}
    const C2 y = zetaChart ? chart(std::polar(1.0, -t)) : chart(std::polar(radius, t));
    out[j] = normalize(y);
  }
  return out;
}

inline void finish_bundle(FoldedMapBundle& b) {
  b.uPlusBoundary = chart_boundary(b.uPlusChart, b.sigmaRadius, b.M, false);
  b.uMinusBoundary = chart_boundary(b.uMinusChart, b.sigmaRadius, b.M, true);
  b.vPair = make_conjugate_pair(b.vPair.vPlus, b.vPair.vMinus);
  b.energy = bundle_energies(b);
}

}  // namespace detail

inline FoldedMapBundle degree1_family(const ModuliParam& param, std::size_t M = 512) {
  param.validate();
  if (std::abs(param.c) > 0.99 + 1e-12)
    throw Error(ErrorKind::Input, "|c| > 0.99: use compactification_sample for the limit");
  const cplx c = param.c, m = param.m;
  const double rho = param.rho();
  const CharacteristicParam x{m};

  FoldedMapBundle b;
  b.kind = "degree1";
  b.M = M;
  b.sigmaRadius = 1.0;
  b.psiScale = rho;
  b.param = param;
  b.uPlusChart = [=](cplx z) { return C2(rho * m * z, m * c); };
  b.uMinusChart = [=](cplx zeta) { return C2(rho * m * zeta, m * c * zeta * zeta); };
  FoldMap vp = [=](cplx z) { return normalize(C2(m * z, m * c)); };
  FoldMap vm = [=](cplx z) { return normalize(C2(m / z, m * c / (z * z))); };
  b.vPair.vPlus = make_tunnel_sample(vp, rho, x, 1, M);
  b.vPair.vMinus = make_tunnel_sample(vm, rho, x, -1, M);
  b.labelPlus = {x, 1};
  b.labelMinus = {x, 1};
  b.trackingPoint = C2(rho * m, m * c);
  detail::finish_bundle(b);
  return b;
}

// Radius of the circle |w| = 1 when the fold of w is a circle about 0.
inline double circular_fold_radius(const CurveInput& curve, std::size_t M = 512) {
  if (std::abs(curve.eval(0.0).norm()) >= 1.0)
    throw Error(ErrorKind::TierViolation, "|w(0)| >= 1: the upper domain is not a disk about 0");
  auto maxNorm = [&](double r) {
    double mx = 0.0;
    for (std::size_t j = 0; j < M; ++j) mx = std::max(mx, curve.eval(std::polar(r, angle_at(j, M))).norm());
    return mx;
  };
  double lo = 0.0, hi = 1.0;
  while (maxNorm(hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e8) throw Error(ErrorKind::Input, "curve does not reach the fold");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (maxNorm(mid) < 1.0 ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  double defect = 0.0;
  for (std::size_t j = 0; j < M; ++j)
    defect = std::max(defect, std::abs(curve.eval(std::polar(r, angle_at(j, M))).norm() - 1.0));
  if (defect > 1e-8) throw Error(ErrorKind::TierViolation, "fold of w is not a circle centered at 0");
  return r;
}

inline FoldedMapBundle construct_degree_d(const CurveInput& curve, std::size_t M = 512) {
  if (std::abs(std::abs(curve.m) - 1.0) > 1e-12) throw Error(ErrorKind::Input, "|m| must be 1");
  const int d = curve.degree();
  if (d < 1) throw Error(ErrorKind::Input, "curve must have degree >= 1");
  if (CurveInput::degree_of(curve.p) != d || CurveInput::degree_of(curve.q) >= d)
    throw Error(ErrorKind::TierViolation, "the puncture must lie on the characteristic: need deg p > deg q");
  const double rf = circular_fold_radius(curve, M);
  const CharacteristicParam x{curve.m};

  FoldedMapBundle b;
  b.kind = "degree_d";
  b.M = M;
  b.sigmaRadius = rf;
  b.psiScale = 1.0;
  b.curve = curve;
  b.uPlusChart = [curve](cplx z) { return curve.eval(z); };
  FoldMap vp = [curve](cplx z) { return normalize(curve.eval(z)); };
  b.vPair.vPlus = make_tunnel_sample(vp, rf, x, d, M);

  // Immersion of the F-part along the lower domain.
  {
    const PatchData P = detail::stored_patch(b.vPair.vPlus);
    double mn = INFINITY;
    for (std::size_t k = 0; k < P.v.size(); ++k) {
      const FoldPoint p(P.v[k]);
      mn = std::min(mn, hopf_differential(p, P.dth[k]).norm());
    }
    if (mn < 1e-6) throw Error(ErrorKind::NonImmersed, "pi_F dw vanishes on the lower domain");
  }

  const BoundaryLoopSamples beta = beta_theta_rings(b.vPair.vPlus).front();
  const cplx lead = curve.p[static_cast<std::size_t>(d)];
  const FoldPoint marker(lead / std::abs(lead), 0.0);
  const DegreeDMultiplier mult = solve_f_degree_d(beta, marker, x, d);
  const LaurentField f = mult.multiplier;

  // In zeta = rf / z: f w = zeta^d F(zeta) W(zeta) with F, W power series.
  CVec Fser;
  for (int n = -2 * d; n >= -f.N; --n) Fser.push_back(f.c(n));
  CVec Wp(static_cast<std::size_t>(d + 1), 0.0), Wq(static_cast<std::size_t>(d + 1), 0.0);
  for (int k = 0; k <= d; ++k) {
    const double s = std::pow(rf, k);
    if (static_cast<std::size_t>(k) < curve.p.size()) Wp[static_cast<std::size_t>(d - k)] = curve.p[static_cast<std::size_t>(k)] * s;
    if (static_cast<std::size_t>(k) < curve.q.size()) Wq[static_cast<std::size_t>(d - k)] = curve.q[static_cast<std::size_t>(k)] * s;
  }
  b.uMinusChart = [=](cplx zeta) {
    const cplx F = CurveInput::horner(Fser, zeta);
    const cplx pre = std::pow(zeta, d) * F;
    return C2(pre * CurveInput::horner(Wp, zeta), pre * CurveInput::horner(Wq, zeta));
  };
  // |f w| <= 1 on the lower domain is needed for u- to land in the lower hemisphere
  double mx = 0.0;
  for (int i = 0; i <= 64; ++i)
    for (std::size_t j = 0; j < 128; ++j) mx = std::max(mx, b.uMinusChart(std::polar(i / 64.0, angle_at(j, 128))).norm());
  b.maxLowerChartNorm = mx;
  if (mx > 1.0 + 1e-9) throw Error(ErrorKind::Domain, "f w leaves the closed unit ball: u- is not in the lower hemisphere");

  FoldMap vm = [curve, f](cplx z) { return normalize(f.holomorphic(z) * curve.eval(z)); };
  b.vPair.vMinus = make_tunnel_sample(vm, rf, x, -d, M);
  b.labelPlus = {x, d};
  b.labelMinus = {x, d};
  b.trackingPoint = curve.eval(rf);
  detail::finish_bundle(b);
  return b;
}

struct VerifyReport {
  double holoPlus = 0.0, holoMinus = 0.0;  // antilinear part of the chart derivative
  double tauDefect = 0.0;                  // sign or vanishing failure of u^* det(omega)
  double boundaryPlus = 0.0, boundaryMinus = 0.0;
  HResidual hPlus{}, hMinus{};
  double periodPlus = 0.0, periodMinus = 0.0;
  double gapMin = 0.0;
  ConjugateReport conj;
  double tolerance = 1e-8;

  double worst() const {
    return std::max({holoPlus, holoMinus, tauDefect, boundaryPlus, boundaryMinus, hPlus.Fresidual, hPlus.Lresidual,
                     hMinus.Fresidual, hMinus.Lresidual, periodPlus, periodMinus, conj.worst(),
                     gapMin > 0.0 ? 0.0 : 1.0});
  }
  bool pass() const { return worst() < tolerance; }
};

namespace detail {

inline double antiholomorphic_residual(const std::function<C2(cplx)>& chart, double radius, std::size_t M) {
  const ChebyshevGrid grid(0.0, radius, 16);
  const PatchData P = sample_patch([&](double r, double t) { return chart(std::polar(r, t)); }, grid, M);
  double worst = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = grid.nodes()[i];
    for (std::size_t j = 0; j < M; ++j) {
      const std::size_t k = P.idx(i, j);
      worst = std::max(worst, 0.5 * (P.du[k] + cplx(0.0, 1.0 / r) * P.dth[k]).norm());
    }
  }
  return worst;
}

inline double tau_defect(const FoldedMapBundle& b) {
  double defect = 0.0;
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j < 16; ++j) {
      const double s = i / 8.0, t = kTwoPi * j / 16.0;
      const double tp = det_omega(b.uPlus(std::polar(s * b.sigmaRadius, t)));
      const double tm = det_omega(b.uMinusZeta(std::polar(s, t)));
      if (i == 8) {
        defect = std::max({defect, std::abs(tp), std::abs(tm)});
      } else {
        if (tp <= 0.0) defect = std::max(defect, std::abs(tp) + 1.0);
        if (tm >= 0.0) defect = std::max(defect, std::abs(tm) + 1.0);
      }
    }
  return defect;
}

}  // namespace detail

inline BoundaryLoopSamples bundle_gap(const FoldedMapBundle& b) {
  return gap_function(alpha_tangent(b.uPlusBoundary, b.sigmaRadius), alpha_tangent(b.uMinusBoundary, b.sigmaRadius));
}

inline VerifyReport verify_folded_holomorphic(const FoldedMapBundle& b, double tol = 1e-8) {
  VerifyReport r;
  r.tolerance = tol;
  r.holoPlus = detail::antiholomorphic_residual(b.uPlusChart, b.sigmaRadius, b.M);
  r.holoMinus = detail::antiholomorphic_residual(b.uMinusChart, 1.0, b.M);
  r.tauDefect = detail::tau_defect(b);
  const auto& vp = b.vPair.vPlus.boundary;
  const auto& vm = b.vPair.vMinus.boundary;
  for (std::size_t j = 0; j < b.M; ++j) {
    r.boundaryPlus = std::max(r.boundaryPlus, (b.uPlusBoundary[j].vec() - vp[j].vec()).norm());
    r.boundaryMinus = std::max(r.boundaryMinus, (b.uMinusBoundary[j].vec() - vm[j].vec()).norm());
  }
  r.hPlus = residual_H(b.vPair.vPlus);
  r.hMinus = residual_H(b.vPair.vMinus);
  r.periodPlus = check_periods(b.vPair.vPlus);
  r.periodMinus = check_periods(b.vPair.vMinus);
  try {
    const auto a = bundle_gap(b);
    r.gapMin = INFINITY;
    for (auto v : a.values) r.gapMin = std::min(r.gapMin, v.real());
  } catch (const Error&) {
    r.gapMin = 0.0;
  }
  r.conj = check_conjugate(b.vPair);
  return r;
}

struct CompactificationRow {
  double cAbs;
  double Eplus, Eminus, Etotal;
  std::string limitLabel;
};

inline std::string format_complex(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// Energies along c = |c| e^{i phi}; the u+ bubble collapses to (0, m e^{i phi}).
inline std::vector<CompactificationRow> compactification_sample(std::span<const double> cAbs, cplx m, double phi = 0.0,
                                                                std::size_t M = 128) {
  std::vector<CompactificationRow> rows;
  const std::size_t nr = energy_rings();
  for (double s : cAbs) {
    const ModuliParam p{std::polar(s, phi), m};
    p.validate();
    const double rho = p.rho();
    const cplx c = p.c;
    const double ep = omega_energy(sample_polar(
        [&](double r, double t) {
          return project_equator(embed_hemisphere(Side::Plus, C2(rho * m * std::polar(r, t), m * c)));
        },
        0.0, 1.0, nr, M));
    const double em = omega_energy(sample_polar(
        [&](double r, double t) {
          const cplx z = std::polar(r, t);
          return project_equator(embed_hemisphere(Side::Minus, C2(rho * m * z, m * c * z * z)));
        },
        0.0, 1.0, nr, M));
    rows.push_back({s, ep, em, ep + em, "(0," + format_complex(m * std::polar(1.0, phi)) + ")"});
  }
  return rows;
}

inline Vec3 hopf_reduce(const ModuliParam& p) {
  p.validate();
  return hopf_project(normalize(C2(p.rho() * p.m, p.m * p.c)));
}

}  // namespace folded
