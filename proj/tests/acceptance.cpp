// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "folded/index_ellipticity.hpp"

using namespace folded;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

struct Member {
  ModuliParam p;
  FoldedMapBundle b;
  VerifyReport v;
  double seconds;
};

std::vector<Member> family_members() {
  std::mt19937 rng(20261019);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Member> out;
  for (int k = 0; k < 20; ++k) {
    // area-uniform in the closed disk of radius 0.9, plus the center and the rim
    double s = 0.9 * std::sqrt(u(rng));
    if (k == 0) s = 0.0;
    if (k == 1) s = 0.9;
    const ModuliParam p{std::polar(s, kTwoPi * u(rng)), std::polar(1.0, kTwoPi * u(rng))};
    const auto t0 = std::chrono::steady_clock::now();
    FoldedMapBundle b = degree1_family(p, 512);
    VerifyReport v = verify_folded_holomorphic(b, 1e-7);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back({p, std::move(b), v, dt});
  }
  return out;
}

void criterion(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, name, ok, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double spread(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
}

}  // namespace

int main() {
  std::vector<Member> fam;
  try {
    fam = family_members();
  } catch (const std::exception& e) {
    std::printf("family construction failed: %s\n", e.what());
    return 1;
  }

  criterion(1, "degree-1 family verification", [&] {
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    for (const auto& m : fam) {
      worst = std::max(worst, m.v.worst());
      slowest = std::max(slowest, m.seconds);
      ok = ok && m.v.pass() && m.seconds < 10.0;
    }
    return std::pair{ok, fmt("20 members, M=512: worst residual %.2e (< 1e-7), slowest %.2fs (< 10s)", worst, slowest)};
  });

  criterion(2, "energy identities", [&] {
    std::vector<double> total, plusPair;
    double vdiff = 0.0;
    for (const auto& m : fam) {
      total.push_back(m.b.energy.uPlus + m.b.energy.uMinus);
      plusPair.push_back(m.b.energy.uPlus + m.b.energy.vPlus);
      vdiff = std::max(vdiff, std::abs(m.b.energy.vPlus - m.b.energy.vMinus));
    }
    const double relTotal = spread(total) / std::abs(total[0]);
    const double relPair = spread(plusPair) / std::abs(plusPair[0]);
    const bool ok = relTotal < 1e-6 && vdiff < 1e-7 && relPair < 1e-6;
    return std::pair{ok, fmt("E(u+)+E(u-) spread %.2e rel; |E(v+)-E(v-)| %.2e; E(u+)+E(v+) spread %.2e rel", relTotal,
                             vdiff, relPair)};
  });

  criterion(3, "compactification trend", [&] {
    std::vector<double> s(8);
    for (int k = 0; k < 8; ++k) s[static_cast<std::size_t>(k)] = 0.99 * k / 7.0;
    const auto rows = compactification_sample(s, 1.0, 0.0, 256);
    bool dec = true;
    for (std::size_t k = 1; k < rows.size(); ++k) dec = dec && rows[k].Eplus < rows[k - 1].Eplus;
    const double frac = rows.back().Eplus / rows.back().Etotal;
    return std::pair{dec && frac < 0.02, fmt("E(u+) strictly decreasing: %s; E(u+)/E at |c|=0.99: %.4f (< 0.02)",
                                             dec ? "yes" : "no", frac)};
  });

  criterion(4, "index reproduction", [&] {
    bool loopsOk = true;
    for (int d = 1; d <= 3; ++d) {
      TotallyRealLoop L;
      for (std::size_t j = 0; j < 256; ++j) {
        Frame2 F = Frame2::Zero();
        F(0, 0) = std::polar(1.0, d * angle_at(j, 256));
        F(1, 1) = 1.0;
        L.frames.push_back(F);
      }
      loopsOk = loopsOk && maslov_index(L) == 2 * d;
    }
    std::string got;
    bool bundleOk = true;
    for (int d = 1; d <= 5; ++d) {
      CurveInput w;
      w.p.assign(static_cast<std::size_t>(d + 1), 0.0);
      w.p.back() = 1.0;
      w.q = {0.3};
      const auto b = construct_degree_d(w, 512);
      const auto loops = boundary_condition_loops(b);
      const int mp = maslov_index(loops.plus), mm = maslov_index(loops.minus);
      const int r = reduced_index(mp, mm, 2);
      bundleOk = bundleOk && r == 4 * d - 1;
      got += fmt(" d=%d:%d+%d->%d", d, mp, mm, r);
    }
    return std::pair{loopsOk && bundleOk,
                     fmt("mu(R e^{id.} x R)=2d for d=1..3: %s; bundle (mu+ + mu- -> reduced, want 4d-1):",
                         loopsOk ? "yes" : "no") + got};
  });

  criterion(5, "ellipticity certificate", [&] {
    bool ok = true;
    double worstRatio = INFINITY;
    for (const auto& m : fam) {
      const auto d = make_boperator_data(m.b);
      const auto rep = check_ellipticity(d);
      const double amin = *std::min_element(d.a.begin(), d.a.end());
      worstRatio = std::min(worstRatio, rep.sigmaMin / amin);
      ok = ok && rep.pass() && rep.sigmaMin > 0.1 * amin;
    }
    auto d = make_boperator_data(fam[3].b);
    d.a[100] = 0.0;
    const auto broken = check_ellipticity(d);
    const bool flips = !broken.pass() && broken.location == 100;
    return std::pair{ok && flips, fmt("20 bundles PASS, min sigmaMin/min(a) = %.3f (> 0.1); zeroed a -> %s at sample %zu",
                                      worstRatio, broken.pass() ? "PASS" : "FAIL", broken.location)};
  });

  criterion(6, "conjugate-partner oracle", [&] {
    double err = 0.0;
    for (int k = 0; k < 20; k += 4) {
      const auto& m = fam[static_cast<std::size_t>(k)];
      const auto vm = conjugate_partner(m.b.vPair.vPlus, m.b.vPair.x);
      for (std::size_t i = 0; i < vm.rings.size(); ++i)
        for (std::size_t j = 0; j < vm.M; ++j)
          err = std::max(err, (vm.ringValues[i][j].vec() - m.b.vPair.vMinus.ringValues[i][j].vec()).norm());
    }
    return std::pair{err < 1e-7, fmt("sup |v- (partner) - v- (closed form)| = %.2e over 5 members, M=512", err)};
  });

  criterion(7, "degree-d oracle equivalence", [&] {
    double mapErr = 0.0, resErr = 0.0;
    for (cplx c : {cplx(0.5), cplx(0.3, 0.4), cplx(-0.6, 0.1)}) {
      const auto fam1 = degree1_family({c, 1.0}, 512);
      const auto con = construct_degree_d(CurveInput{{0.0, 1.0}, {c}, 1.0}, 512);
      const double rho = fam1.psiScale;
      for (int i = 0; i <= 8; ++i)
        for (int j = 0; j < 32; ++j) {
          const cplx z = std::polar(i / 8.0, kTwoPi * j / 32.0);
          mapErr = std::max(mapErr, (fam1.uPlusChart(z) - con.uPlusChart(rho * z)).norm());
          mapErr = std::max(mapErr, (fam1.uMinusChart(z) - con.uMinusChart(z)).norm());
        }
      for (std::size_t i = 0; i < fam1.vPair.vPlus.rings.size(); ++i)
        for (std::size_t j = 0; j < fam1.M; ++j) {
          mapErr = std::max(mapErr, (fam1.vPair.vPlus.ringValues[i][j].vec() - con.vPair.vPlus.ringValues[i][j].vec()).norm());
          mapErr = std::max(mapErr, (fam1.vPair.vMinus.ringValues[i][j].vec() - con.vPair.vMinus.ringValues[i][j].vec()).norm());
        }
      const auto a = verify_folded_holomorphic(fam1), b = verify_folded_holomorphic(con);
      const double fa[] = {a.holoPlus, a.holoMinus, a.tauDefect, a.boundaryPlus, a.boundaryMinus, a.hPlus.Fresidual,
                           a.hPlus.Lresidual, a.hMinus.Fresidual, a.hMinus.Lresidual, a.periodPlus, a.periodMinus,
                           a.conj.worst(), a.gapMin};
      const double fb[] = {b.holoPlus, b.holoMinus, b.tauDefect, b.boundaryPlus, b.boundaryMinus, b.hPlus.Fresidual,
                           b.hPlus.Lresidual, b.hMinus.Fresidual, b.hMinus.Lresidual, b.periodPlus, b.periodMinus,
                           b.conj.worst(), b.gapMin};
      for (std::size_t k = 0; k < std::size(fa); ++k) resErr = std::max(resErr, std::abs(fa[k] - fb[k]));
    }
    return std::pair{mapErr < 1e-7 && resErr < 1e-7,
                     fmt("map samples differ by %.2e, residuals by %.2e (3 parameters)", mapErr, resErr)};
  });

  criterion(8, "operator-B graph consistency", [&] {
    const auto& m = fam[5];
    const auto B = build_B(make_boperator_data(m.b));
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> mode(-8, 8);
    std::normal_distribution<double> n;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      auto xi = BoundarySectionEF::zero(m.b.M);
      const int k = mode(rng);
      const cplx cf(n(rng), n(rng));
      for (std::size_t j = 0; j < m.b.M; ++j) xi.xiF[j] = cf * std::polar(1.0, k * angle_at(j, m.b.M));
      worst = std::max(worst, graph_check_dDeltaZ(m.b.vPair, B, xi));
    }
    return std::pair{worst < 1e-7, fmt("20 single-mode sections, |c|=%.3f: worst residual %.2e", std::abs(m.p.c), worst)};
  });

  criterion(9, "harmonic engine spectral suite", [&] {
    std::mt19937 rng(9);
    std::normal_distribution<double> n;
    const std::size_t M = 256;
    double bvp = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      // random band-limited harmonic function, evaluated exactly inside
      std::vector<cplx> a(9);
      for (auto& x : a) x = cplx(n(rng), n(rng));
      const double rho = 0.5 + trial * 0.2;
      auto disk = [&](cplx z) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::pow(z / rho, static_cast<int>(k));
        return s.real();
      };
      auto ext = [&](cplx z) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::pow(rho / z, static_cast<int>(k));
        return s.real();
      };
      auto dsol = solve_dirichlet(BoundaryLoopSamples::sample([&](cplx z) { return cplx(disk(z)); }, rho, M),
                                  Domain::disk(rho));
      auto esol = solve_dirichlet(BoundaryLoopSamples::sample([&](cplx z) { return cplx(ext(z)); }, rho, M),
                                  Domain::exterior(rho));
      double scale = 0.0;
      for (auto x : a) scale += std::abs(x);
      for (double r : {0.1, 0.5, 0.9})
        for (double t : {0.3, 2.0, 4.4}) {
          bvp = std::max(bvp, std::abs(dsol.harmonic(std::polar(r * rho, t)) - disk(std::polar(r * rho, t))) / scale);
          bvp = std::max(bvp, std::abs(esol.harmonic(std::polar(rho / r, t)) - ext(std::polar(rho / r, t))) / scale);
        }
      // Neumann: data -r d/dr of the exterior function on the circle
      auto normal = [&](cplx z) {
        cplx s = 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) s += a[k] * double(k) * std::pow(rho / z, static_cast<int>(k));
        return s.real();
      };
      auto nsol = solve_neumann_vanishing(
          BoundaryLoopSamples::sample([&](cplx z) { return cplx(normal(z)); }, rho, M), Domain::exterior(rho));
      for (double r : {0.2, 0.7})
        for (double t : {1.0, 3.0}) {
          const cplx z = std::polar(rho / r, t);
          bvp = std::max(bvp, std::abs(nsol.harmonic(z) - (ext(z) - a[0].real())) / scale);
        }
    }
    // period of d(arg z) is 2 pi; of an exact differential, 0
    const auto dth = BoundaryLoopSamples::sample([](cplx) { return cplx(1.0); }, 1.0, M);
    const auto exact = BoundaryLoopSamples::sample([](cplx z) { return cplx(std::cos(3 * std::arg(z))); }, 1.0, M);
    const double perr = std::max(std::abs(boundary_period(dth) - kTwoPi), std::abs(boundary_period(exact)));
    // B(R) = -R on a family bundle
    const auto B = build_B(make_boperator_data(fam[7].b));
    auto xi = BoundarySectionEF::zero(fam[7].b.M);
    for (auto& x : xi.zetaL) x = 1.0;
    const auto out = B.apply(xi);
    double berr = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j)
      berr = std::max({berr, std::abs(out.zetaL[j] + 1.0), std::abs(out.zetaK[j]), std::abs(out.xiF[j])});
    return std::pair{bvp < 1e-10 && perr < 1e-12 && berr < 1e-9,
                     fmt("BVP rel err %.2e (< 1e-10); period err %.2e (< 1e-12); |B(R)+R| %.2e (< 1e-9)", bvp, perr,
                         berr)};
  });

  criterion(10, "flat-fold check", [&] {
    std::vector<FlatFoldPoint> pts;
    for (int j = 0; j < 64; ++j)
      pts.push_back({std::polar(1.0, kTwoPi * j / 64.0), cplx(j / 64.0, 0.25), cplx(0.5, -j / 64.0)});
    double graph = 0.0, half = 0.0, torus = 0.0;
    for (int k = 0; k < 64; ++k) {
      const auto rep = flat_fold_diagonal_check(k / 64.0, pts);
      graph = std::max(graph, rep.graphResidual);
      half = std::max(half, rep.halfPeriodResidual);
      torus = std::max(torus, rep.torusResidual);
    }
    return std::pair{graph < 1e-14 && half == 0.0 && torus == 0.0,
                     fmt("64x64 grid: graph %.1e, half-period %.1e, torus factor %.1e", graph, half, torus)};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
