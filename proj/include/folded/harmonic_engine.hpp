#pragma once

// Spectral boundary value problems on disks, annuli and exteriors of
// circles. A harmonic field is stored as a holomorphic Laurent series F with
// the field equal to Re F (plus an optional log|z| term on annuli).
// Exterior domains are punctured at infinity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "folded/core_geometry.hpp"
#include "folded/errors.hpp"
#include "folded/spectral.hpp"

namespace folded {

enum class DomainKind { Disk, Annulus, ExteriorPunctured };

struct Domain {
  DomainKind kind = DomainKind::Disk;
  double rho = 1.0;     // boundary radius; inner radius for annuli
  double rhoOut = 0.0;  // outer radius for annuli

  static Domain disk(double r) { return {DomainKind::Disk, r, 0.0}; }
  static Domain exterior(double r) { return {DomainKind::ExteriorPunctured, r, 0.0}; }
  static Domain annulus(double a, double b) {
    if (!(b > a && a > 0.0)) throw Error(ErrorKind::Input, "annulus radii must satisfy 0 < a < b");
    return {DomainKind::Annulus, a, b};
  }

  bool contains(cplx z, double slack = 1e-12) const {
    const double r = std::abs(z);
    switch (kind) {
      case DomainKind::Disk: return r <= rho * (1 + slack);
      case DomainKind::ExteriorPunctured: return r >= rho * (1 - slack);
      case DomainKind::Annulus: return r >= rho * (1 - slack) && r <= rhoOut * (1 + slack);
    }
    return false;
  }
};

struct BoundaryLoopSamples {
  CVec values;
  double radius = 1.0;
  bool positive = true;  // counterclockwise

  BoundaryLoopSamples() = default;
  BoundaryLoopSamples(CVec v, double r, bool pos = true) : values(std::move(v)), radius(r), positive(pos) {}
  BoundaryLoopSamples(const RVec& v, double r, bool pos = true) : values(v.begin(), v.end()), radius(r), positive(pos) {}

  std::size_t size() const { return values.size(); }
  double angle(std::size_t j) const { return angle_at(j, values.size()); }
  cplx point(std::size_t j) const { return std::polar(radius, angle(j)); }

  RVec real() const {
    RVec r(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) r[j] = values[j].real();
    return r;
  }

  void check_resolution(double limit = 1e-10) const {
    if (!is_power_of_two(values.size())) throw Error(ErrorKind::Resolution, "sample count must be a power of two");
    if (nyquist_fraction(values) > limit) throw Error(ErrorKind::Resolution, "boundary data is under-resolved");
  }

  template <class Fn>
  static BoundaryLoopSamples sample(Fn&& fn, double radius, std::size_t M) {
    CVec v(M);
    for (std::size_t j = 0; j < M; ++j) v[j] = fn(std::polar(radius, angle_at(j, M)));
    return BoundaryLoopSamples(std::move(v), radius);
  }
};

struct LaurentField {
  Domain domain;
  int N = 0;
  CVec coeffs;             // c_n at index n + N; F(z) = sum c_n (z/rho)^n
  double logCoeff = 0.0;   // harmonic part logCoeff * log(|z|/rho)
  int punctureOrder = 0;   // nonzero when a puncture pole/zero order is prescribed

  LaurentField() = default;
  LaurentField(Domain d, int n) : domain(d), N(n), coeffs(static_cast<std::size_t>(2 * n + 1), cplx(0.0)) {}

  cplx& c(int n) { return coeffs[static_cast<std::size_t>(n + N)]; }
  cplx c(int n) const { return std::abs(n) > N ? cplx(0.0) : coeffs[static_cast<std::size_t>(n + N)]; }

  // Horner in q for n >= 0 and in 1/q for n < 0; a side with no nonzero
  // coefficients is skipped, so disks can be evaluated at the center.
  cplx holomorphic(cplx z) const {
    const cplx q = z / domain.rho;
    cplx pos = 0.0, neg = 0.0;
    for (int n = N; n >= 1; --n) pos = (pos + c(n)) * q;
    if (has_negative()) {
      const cplx qi = 1.0 / q;
      for (int n = N; n >= 1; --n) neg = (neg + c(-n)) * qi;
    }
    return c(0) + pos + neg;
  }

  cplx derivative(cplx z) const {
    const cplx q = z / domain.rho;
    cplx pos = 0.0, neg = 0.0;
    for (int n = N; n >= 1; --n) pos = pos * q + static_cast<double>(n) * c(n);
    if (has_negative()) {
      const cplx qi = 1.0 / q;
      for (int n = N; n >= 1; --n) neg = (neg + static_cast<double>(n) * c(-n)) * qi;
      neg *= -qi;
    }
    return (pos + neg) / domain.rho;
  }

  bool has_negative() const {
    for (int n = 1; n <= N; ++n)
      if (c(-n) != cplx(0.0)) return true;
    return false;
  }

  double harmonic(cplx z) const {
    double v = holomorphic(z).real();
    if (logCoeff != 0.0) v += logCoeff * std::log(std::abs(z) / domain.rho);
    return v;
  }

  // Value at the puncture (exterior) or center (disk).
  cplx anchor_value() const { return c(0); }

  BoundaryLoopSamples trace(double radius, std::size_t M, bool holo = false) const {
    CVec v(M);
    for (std::size_t j = 0; j < M; ++j) {
      const cplx z = std::polar(radius, angle_at(j, M));
      v[j] = holo ? holomorphic(z) : cplx(harmonic(z), 0.0);
    }
    return BoundaryLoopSamples(std::move(v), radius);
  }

  // Coefficients outside the index range allowed by the domain must vanish.
  void validate(double tol = 1e-12) const {
    double scale = 0.0;
    for (auto x : coeffs) scale = std::max(scale, std::abs(x));
    for (int n = -N; n <= N; ++n) {
      const bool bad = (domain.kind == DomainKind::Disk && n < 0) ||
                       (domain.kind == DomainKind::ExteriorPunctured && n > std::max(0, punctureOrder));
      if (bad && std::abs(c(n)) > tol * std::max(1.0, scale))
        throw Error(ErrorKind::Domain, "Laurent coefficient outside the domain's index range");
    }
    if (domain.kind != DomainKind::Annulus && logCoeff != 0.0)
      throw Error(ErrorKind::Domain, "log term only allowed on annuli");
  }
};

namespace detail {

inline int default_order(std::size_t M) { return static_cast<int>(M / 2) - 1; }

inline CVec real_data_coefficients(const BoundaryLoopSamples& data) {
  RVec re = data.real();
  return fourier_coefficients(std::span<const double>(re));
}

}  // namespace detail

// Real-valued Dirichlet problem. Annuli take two loops (inner, outer).
inline LaurentField solve_dirichlet(std::span<const BoundaryLoopSamples> data, const Domain& dom) {
  const std::size_t need = dom.kind == DomainKind::Annulus ? 2 : 1;
  if (data.size() != need) throw Error(ErrorKind::Input, "wrong number of boundary loops for the domain");
  for (const auto& d : data) d.check_resolution();
  const std::size_t M = data[0].size();
  const int N = detail::default_order(M);
  LaurentField F(dom, N);

  if (dom.kind == DomainKind::Annulus) {
    if (data[1].size() != M) throw Error(ErrorKind::Input, "annulus loops must have equal sample counts");
    const CVec a = detail::real_data_coefficients(data[0]);
    const CVec b = detail::real_data_coefficients(data[1]);
    const double ratio = dom.rhoOut / dom.rho;
    F.c(0) = a[0].real();
    F.logCoeff = (b[0].real() - a[0].real()) / std::log(ratio);
    for (int k = 1; k <= N; ++k) {
      // Fourier coefficient of Re F at e^{ik theta}, radius r:
      // (c_k (r/rho)^k + conj(c_{-k}) (r/rho)^{-k}) / 2
      const cplx ak = a[slot_of(k, M)], bk = b[slot_of(k, M)];
      const double p = std::pow(ratio, k), pi = 1.0 / p;
      const double det = pi - p;
      const cplx ck = 2.0 * (ak * pi - bk) / det;
      const cplx cmk_conj = 2.0 * (bk - ak * p) / det;
      F.c(k) = ck;
      F.c(-k) = std::conj(cmk_conj);
    }
    return F;
  }

  const CVec d = detail::real_data_coefficients(data[0]);
  if (std::abs(data[0].radius - dom.rho) > 1e-12 * dom.rho)
    throw Error(ErrorKind::Input, "boundary radius does not match the domain");
  F.c(0) = d[0].real();
  for (int k = 1; k <= N; ++k) {
    if (dom.kind == DomainKind::Disk)
      F.c(k) = 2.0 * d[slot_of(k, M)];
    else
      F.c(-k) = 2.0 * d[slot_of(-k, M)];
  }
  return F;
}

inline LaurentField solve_dirichlet(const BoundaryLoopSamples& data, const Domain& dom) {
  return solve_dirichlet(std::span<const BoundaryLoopSamples>(&data, 1), dom);
}

// Conjugate g with f + i g holomorphic and g(anchor) = 0.
inline LaurentField harmonic_conjugate(const LaurentField& f) {
  if (f.logCoeff != 0.0)
    throw Error(ErrorKind::PeriodObstruction, "log|z| has a multivalued conjugate");
  LaurentField g = f;
  for (auto& x : g.coeffs) x *= cplx(0.0, -1.0);
  g.c(0) = 0.0;
  return g;
}

// Harmonic g vanishing at the anchor whose normal data dg(j d/dtheta) equals
// the given samples on the boundary circle.
inline LaurentField solve_neumann_vanishing(const BoundaryLoopSamples& data, const Domain& dom) {
  if (dom.kind == DomainKind::Annulus) throw Error(ErrorKind::Input, "Neumann solve needs a disk-type domain");
  data.check_resolution();
  const std::size_t M = data.size();
  const CVec d = detail::real_data_coefficients(data);
  double scale = 0.0;
  for (auto x : d) scale = std::max(scale, std::abs(x));
  if (std::abs(d[0]) > 1e-10 * std::max(1.0, scale))
    throw Error(ErrorKind::PeriodObstruction, "boundary data has nonzero mean");
  const int N = detail::default_order(M);
  LaurentField g(dom, N);
  // dg(j d/dtheta) = -r dg/dr; on the mode (z/rho)^{+-k} this is -+k times the mode.
  for (int k = 1; k <= N; ++k) {
    if (dom.kind == DomainKind::ExteriorPunctured)
      g.c(-k) = 2.0 * d[slot_of(-k, M)] / static_cast<double>(k);
    else
      g.c(k) = -2.0 * d[slot_of(k, M)] / static_cast<double>(k);
  }
  return g;
}

// Integral of a 1-form around the loop from samples of its value on d/dtheta.
inline double boundary_period(const BoundaryLoopSamples& oneForm) {
  RVec re = oneForm.real();
  return loop_integral(std::span<const double>(re));
}

struct QtildeResult {
  BoundaryLoopSamples fBoundary, gBoundary;
  LaurentField f, g;
};

inline QtildeResult solve_Qtilde(const BoundaryLoopSamples& zetaK) {
  const Domain dom = Domain::exterior(zetaK.radius);
  QtildeResult out;
  out.f = solve_dirichlet(zetaK, dom);
  out.g = harmonic_conjugate(out.f);
  out.fBoundary = out.f.trace(zetaK.radius, zetaK.size());
  out.gBoundary = out.g.trace(zetaK.radius, zetaK.size());
  return out;
}

// The multiplier exp(Phi) on the exterior of the fold circle, where Phi has
// log-growth -2d log(z/rho), d Re Phi = -2 beta along the boundary, and the
// imaginary constant is fixed by the marker: the characteristic parameter t
// of the marker value gives Im Phi(puncture) = 2 pi (-2 t).
struct DegreeDMultiplier {
  LaurentField multiplier;  // exp(Phi) as a Laurent series
  LaurentField psi;         // the decaying holomorphic part of Phi
  double markerParam;       // t with markerValue = x(t)
  int degree;
};

inline DegreeDMultiplier solve_f_degree_d(const BoundaryLoopSamples& alphaPullbackTangent,
                                          const FoldPoint& markerValue, const CharacteristicParam& x, int degree) {
  if (degree < 1) throw Error(ErrorKind::Input, "degree must be positive");
  const BoundaryLoopSamples& beta = alphaPullbackTangent;
  beta.check_resolution();
  const std::size_t M = beta.size();
  const double rho = beta.radius;
  const double period = boundary_period(beta);
  if (std::abs(period) > 1e-9) throw Error(ErrorKind::PeriodObstruction, "alpha-pullback has a nonzero period");
  const double t = x.param_of(markerValue);

  // Re Phi on the circle: -2 * integral of beta, mean zero.
  RVec b = beta.real();
  CVec bc = fourier_coefficients(std::span<const double>(b));
  CVec prim(M, 0.0);
  for (std::size_t k = 0; k < M; ++k) {
    const long n = wavenumber(k, M);
    if (n != 0 && 2 * std::abs(n) != static_cast<long>(M)) prim[k] = -2.0 * bc[k] / cplx(0.0, static_cast<double>(n));
  }
  CVec rePhi = fourier_synthesis(prim);
  RVec rp(M);
  for (std::size_t j = 0; j < M; ++j) rp[j] = rePhi[j].real();

  DegreeDMultiplier out;
  out.markerParam = t;
  out.degree = degree;
  out.psi = solve_dirichlet(BoundaryLoopSamples(rp, rho), Domain::exterior(rho));
  out.psi.c(0) += cplx(0.0, kTwoPi * (-2.0 * t));

  // exp(Psi) is holomorphic and bounded outside the circle; shift by z^{-2d}.
  CVec ex(M);
  for (std::size_t j = 0; j < M; ++j) ex[j] = std::exp(out.psi.holomorphic(std::polar(rho, angle_at(j, M))));
  CVec ec = fourier_coefficients(std::span<const cplx>(ex));
  const int N = detail::default_order(M) + 2 * degree;
  LaurentField f(Domain::exterior(rho), N);
  f.punctureOrder = -2 * degree;
  for (int n = 0; n <= detail::default_order(M); ++n) f.c(-n - 2 * degree) = ec[slot_of(-n, M)];
  out.multiplier = f;
  return out;
}

}  // namespace folded
