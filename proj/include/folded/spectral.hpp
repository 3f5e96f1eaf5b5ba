#pragma once

// Fourier and Chebyshev building blocks used by every module: uniform loop
// transforms, spectral angular derivatives, Chebyshev-Lobatto radial grids
// with differentiation matrices and Clenshaw-Curtis weights.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "folded/errors.hpp"

namespace folded {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using RVec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(std::size_t m) { return m >= 2 && (m & (m - 1)) == 0; }

inline double angle_at(std::size_t j, std::size_t m) {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(m);
}

// Signed wavenumber of FFT slot k for a length-m transform.
inline long wavenumber(std::size_t k, std::size_t m) {
  const long kk = static_cast<long>(k);
  const long mm = static_cast<long>(m);
  return kk <= mm / 2 ? kk : kk - mm;
}

inline std::size_t slot_of(long n, std::size_t m) {
  const long mm = static_cast<long>(m);
  return static_cast<std::size_t>(((n % mm) + mm) % mm);
}

// Coefficients c_n with values(theta_j) = sum_n c_n exp(i n theta_j), FFT order.
inline CVec fourier_coefficients(std::span<const cplx> values) {
  Eigen::FFT<double> fft;
  std::vector<cplx> in(values.begin(), values.end());
  std::vector<cplx> out;
  fft.fwd(out, in);
  const double inv = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= inv;
  return out;
}

inline CVec fourier_coefficients(std::span<const double> values) {
  CVec tmp(values.begin(), values.end());
  return fourier_coefficients(std::span<const cplx>(tmp));
}

inline CVec fourier_synthesis(std::span<const cplx> coeffs) {
  Eigen::FFT<double> fft;
  std::vector<cplx> in(coeffs.begin(), coeffs.end());
  std::vector<cplx> out;
  fft.inv(out, in);
  const double m = static_cast<double>(coeffs.size());
  for (auto& v : out) v *= m;
  return out;
}

// d/dtheta of periodic samples; the Nyquist mode is dropped.
inline CVec angular_derivative(std::span<const cplx> values) {
  const std::size_t m = values.size();
  CVec c = fourier_coefficients(values);
  for (std::size_t k = 0; k < m; ++k) {
    const long n = wavenumber(k, m);
    c[k] *= (2 * std::abs(n) == static_cast<long>(m)) ? cplx(0.0) : cplx(0.0, static_cast<double>(n));
  }
  return fourier_synthesis(c);
}

inline RVec angular_derivative(std::span<const double> values) {
  CVec tmp(values.begin(), values.end());
  CVec d = angular_derivative(std::span<const cplx>(tmp));
  RVec out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
  return out;
}

// Trapezoidal integral over [0, 2pi); spectrally accurate for periodic data.
inline double loop_integral(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * kTwoPi / static_cast<double>(values.size());
}

// Fraction of spectral energy in modes above 0.9 * M/2.
inline double nyquist_fraction(std::span<const cplx> values) {
  const std::size_t m = values.size();
  CVec c = fourier_coefficients(values);
  double total = 0.0, high = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = std::norm(c[k]);
    total += e;
    if (std::abs(wavenumber(k, m)) > static_cast<long>(0.45 * static_cast<double>(m))) high += e;
  }
  // roundoff-level tails count as resolved even when the data itself is tiny
  if (high < 1e-26) return 0.0;
  return high / total;
}

// Chebyshev-Lobatto nodes on [a, b], ordered from a to b.
class ChebyshevGrid {
 public:
  ChebyshevGrid() : ChebyshevGrid(0.0, 1.0, 3) {}
  ChebyshevGrid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
    if (n < 3) throw Error(ErrorKind::Resolution, "Chebyshev grid needs at least 3 nodes");
    const std::size_t N = n - 1;
    nodes_.resize(n);
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
      // x runs from -1 to 1 so nodes go a -> b
      x[j] = -std::cos(kPi * static_cast<double>(j) / static_cast<double>(N));
      nodes_[j] = 0.5 * (a + b) + 0.5 * (b - a) * x[j];
    }
    // Trefethen's differentiation matrix, negative-sum trick on the diagonal.
    diff_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto cw = [N](std::size_t j) { return (j == 0 || j == N) ? 2.0 : 1.0; };
    for (std::size_t i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        const double v = cw(i) / cw(j) * sgn / (x[i] - x[j]);
        diff_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        rowsum += v;
      }
      diff_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = -rowsum;
    }
    diff_ *= 2.0 / (b - a);

    // Clenshaw-Curtis weights on [-1, 1], scaled to [a, b].
    weights_.assign(n, 0.0);
    for (std::size_t j = 0; j <= N; ++j) {
      const double theta = kPi * static_cast<double>(j) / static_cast<double>(N);
      double s = 0.0;
      for (std::size_t k = 1; k <= N / 2; ++k) {
        const double bk = (2 * k == N) ? 1.0 : 2.0;
        s += bk / (4.0 * static_cast<double>(k * k) - 1.0) * std::cos(2.0 * static_cast<double>(k) * theta);
      }
      double w = (1.0 - s) * 2.0 / static_cast<double>(N);
      if (j == 0 || j == N) w *= 0.5;
      weights_[j] = w * 0.5 * (b - a);
    }
  }

  std::size_t size() const { return n_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const RVec& nodes() const { return nodes_; }
  const RVec& weights() const { return weights_; }
  const Eigen::MatrixXd& diff() const { return diff_; }

  template <class T>
  std::vector<T> differentiate(std::span<const T> f) const {
    std::vector<T> out(n_, T{});
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        out[i] += diff_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * f[j];
    return out;
  }

 private:
  double a_, b_;
  std::size_t n_;
  RVec nodes_;
  RVec weights_;
  Eigen::MatrixXd diff_;
};

}  // namespace folded
