#pragma once

// JSON reports, bundle export/import and certificates.
// Floats are written with 17 significant digits so files round-trip exactly.

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "folded/index_ellipticity.hpp"
#include "folded/moduli_s4.hpp"

namespace folded {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "folded-maps/1";

namespace detail {

inline void write_number(std::ostream& os, double x) {
  if (!std::isfinite(x)) {
    os << "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string end(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << end << "}";
      return;
    }
    case Json::value_t::array: {
      // numeric leaves stay on one line; long sample arrays would be unreadable otherwise
      os << "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",";
        first = false;
        write_json(os, v, indent, depth + 1);
      }
      os << "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(os, j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

inline std::string dump17(const Json& j) {
  std::ostringstream os;
  detail::write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

inline Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const Json& j) {
  if (j.is_number()) return cplx(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::Input, "complex numbers are [re, im]");
  return cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

inline Json to_json(const CVec& v) {
  Json a = Json::array();
  for (auto z : v) a.push_back(to_json(z));
  return a;
}

inline Json to_json(const RVec& v) {
  Json a = Json::array();
  for (auto x : v) a.push_back(x);
  return a;
}

inline CVec cvec_from_json(const Json& j) {
  CVec v;
  for (const auto& x : j) v.push_back(complex_from_json(x));
  return v;
}

inline RVec rvec_from_json(const Json& j) {
  RVec v;
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string("malformed JSON in ") + path + ": " + e.what());
  }
}

inline CurveInput curve_from_json(const Json& j) {
  try {
    CurveInput c;
    c.p = cvec_from_json(j.at("p"));
    c.q = cvec_from_json(j.at("q"));
    c.m = j.contains("m") ? complex_from_json(j.at("m")) : cplx(1.0);
    return c;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string("curve file: ") + e.what());
  }
}

inline Json to_json(const CurveInput& c) { return Json{{"p", to_json(c.p)}, {"q", to_json(c.q)}, {"m", to_json(c.m)}}; }

inline Json to_json(const TotallyRealLoop& L) {
  Json a = Json::array();
  for (const auto& F : L.frames) a.push_back(Json::array({to_json(F(0, 0)), to_json(F(1, 0)), to_json(F(0, 1)), to_json(F(1, 1))}));
  return a;
}

inline TotallyRealLoop loop_from_json(const Json& j) {
  TotallyRealLoop L;
  for (const auto& f : j) {
    if (f.size() != 4) throw Error(ErrorKind::Input, "loop frames have 4 complex entries");
    Frame2 F;
    F(0, 0) = complex_from_json(f.at(0));
    F(1, 0) = complex_from_json(f.at(1));
    F(0, 1) = complex_from_json(f.at(2));
    F(1, 1) = complex_from_json(f.at(3));
    L.frames.push_back(F);
  }
  return L;
}

inline Json to_json(const Certificate& c) {
  Json j{{"sigmaMin", c.sigmaMin},         {"aMin", c.aMin},
         {"homotopyMin", c.homotopyMin},   {"maslovPlus", c.maslovPlus},
         {"maslovMinus", c.maslovMinus},   {"index", c.index},
         {"reducedIndex", c.reducedIndex}, {"status", c.pass ? "PASS" : "FAIL"}};
  if (!c.pass) j["failSample"] = c.failLocation;
  if (c.loopsPerturbed) j["loopsFromNearbyMember"] = true;
  return j;
}

inline Json to_json(const VerifyReport& r) {
  return Json{{"holomorphicPlus", r.holoPlus},
              {"holomorphicMinus", r.holoMinus},
              {"tauDefect", r.tauDefect},
              {"boundaryPlus", r.boundaryPlus},
              {"boundaryMinus", r.boundaryMinus},
              {"tunnelFPlus", r.hPlus.Fresidual},
              {"tunnelLPlus", r.hPlus.Lresidual},
              {"tunnelFMinus", r.hMinus.Fresidual},
              {"tunnelLMinus", r.hMinus.Lresidual},
              {"periodPlus", r.periodPlus},
              {"periodMinus", r.periodMinus},
              {"omegaDefect", r.conj.omegaDefect},
              {"lambdaSup", r.conj.lambdaSup},
              {"markerDefect", r.conj.markerDefect},
              {"baseDefect", r.conj.baseDefect},
              {"eigenDirectionDefect", r.conj.eigenDirectionDefect},
              {"gapMin", r.gapMin},
              {"worst", r.worst()},
              {"tolerance", r.tolerance}};
}

inline Json to_json(const EnergyRecord& e) {
  return Json{{"uPlus", e.uPlus}, {"uMinus", e.uMinus}, {"vPlus", e.vPlus}, {"vMinus", e.vMinus}, {"total", e.total()}};
}

// Boundary data along sigma: enough to recompute the certificate.
inline Json boundary_json(const BOperatorData& d, const BoundaryLoops& loops) {
  RVec theta(d.size());
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = angle_at(j, theta.size());
  return Json{{"M", d.size()},
              {"radius", d.radius},
              {"theta", to_json(theta)},
              {"a", to_json(d.a)},
              {"AF", to_json(d.AF)},
              {"fChi", to_json(d.fChi)},
              {"fJChi", to_json(d.fJChi)},
              {"loopsFromNearbyMember", loops.perturbed},
              {"loopPlus", to_json(loops.plus)},
              {"loopMinus", to_json(loops.minus)}};
}

struct BoundaryImport {
  BOperatorData data;
  BoundaryLoops loops;
};

// Reads the boundary block of a bundle report without validating a > 0, so a
// damaged gap function is reported by the certificate rather than rejected.
inline BoundaryImport boundary_from_json(const Json& report) {
  try {
    if (!report.contains("schema") || report.at("schema") != kSchema)
      throw Error(ErrorKind::Input, "unknown or missing schema");
    const Json& b = report.at("boundary");
    BoundaryImport out;
    out.data.radius = b.at("radius").get<double>();
    out.data.a = rvec_from_json(b.at("a"));
    out.data.AF = cvec_from_json(b.at("AF"));
    out.data.fChi = rvec_from_json(b.at("fChi"));
    out.data.fJChi = rvec_from_json(b.at("fJChi"));
    out.loops.plus = loop_from_json(b.at("loopPlus"));
    out.loops.minus = loop_from_json(b.at("loopMinus"));
    out.loops.perturbed = b.value("loopsFromNearbyMember", false);
    const std::size_t M = b.at("M").get<std::size_t>();
    if (out.data.a.size() != M || out.data.AF.size() != M || out.data.fChi.size() != M ||
        out.data.fJChi.size() != M || out.loops.plus.size() != M || out.loops.minus.size() != M)
      throw Error(ErrorKind::Input, "boundary arrays do not match M");
    return out;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string("bundle file: ") + e.what());
  }
}

}  // namespace folded
