#include "folded/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <regex>

#include "folded/index_ellipticity.hpp"
#include "folded/io.hpp"

namespace folded::cli {

cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  static const std::regex num(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex imag(R"(([+-]?)((\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)?[ij])");
  static const std::regex both(R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij])");
  std::smatch m;
  if (std::regex_match(s, m, num)) return cplx(std::stod(s), 0.0);
  if (std::regex_match(s, m, imag)) {
    const double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return cplx(0.0, m[1] == "-" ? -v : v);
  }
  if (std::regex_match(s, m, both)) {
    const double v = m[3].matched ? std::stod(m[3].str()) : 1.0;
    return cplx(std::stod(m[1].str()), m[2] == "-" ? -v : v);
  }
  throw Error(ErrorKind::Input, "cannot parse complex number '" + raw + "'");
}

namespace {

struct RunConfig {
  std::size_t M = 512;
  Tolerances tol;
  std::string out;

  void validate() const {
    if (!is_power_of_two(M) || M < 64 || M > 8192)
      throw Error(ErrorKind::Input, "M must be a power of two in [64, 8192]");
  }
};

void apply_config_file(RunConfig& cfg, const std::string& path, bool mFromFlag) {
  const Json j = read_json_file(path);
  try {
    if (j.contains("M") && !mFromFlag) cfg.M = j.at("M").get<std::size_t>();
    if (j.contains("tolerance")) {
      const Json& t = j.at("tolerance");
      cfg.tol.geometry = t.value("geometry", cfg.tol.geometry);
      cfg.tol.verify = t.value("verify", cfg.tol.verify);
      cfg.tol.conjugate = t.value("conjugate", cfg.tol.conjugate);
      cfg.tol.immersion = t.value("immersion", cfg.tol.immersion);
      cfg.tol.ellipticity = t.value("ellipticity", cfg.tol.ellipticity);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string("config: ") + e.what());
  }
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::Input, "cannot write " + cfg.out);
  f << text;
}

int bundle_report(const FoldedMapBundle& b, const RunConfig& cfg, Json input, const char* command) {
  const VerifyReport ver = verify_folded_holomorphic(b, cfg.tol.verify);
  const BOperatorData data = make_boperator_data(b);
  const BoundaryLoops loops = boundary_condition_loops(b);
  const Certificate cert = make_certificate(data, loops);
  const bool pass = ver.pass() && cert.pass;
  Json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["status"] = pass ? "PASS" : "FAIL";
  j["input"] = std::move(input);
  j["M"] = b.M;
  j["degree"] = b.labelPlus.d;
  j["sigmaRadius"] = b.sigmaRadius;
  j["psiScale"] = b.psiScale;
  j["residuals"] = to_json(ver);
  j["energies"] = to_json(b.energy);
  j["certificate"] = to_json(cert);
  j["boundary"] = boundary_json(data, loops);
  emit(cfg, dump17(j));
  std::cerr << command << ": " << (pass ? "PASS" : "FAIL") << " (worst residual " << ver.worst()
            << ", sigmaMin " << cert.sigmaMin << ", reduced index " << cert.reducedIndex << ")\n";
  return pass ? kPass : kVerifyFail;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Input:
    case ErrorKind::Resolution:
      return kInputError;
    case ErrorKind::TierViolation:
      return kTierViolation;
    default:
      return kVerifyFail;
  }
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Folded holomorphic maps into S^4: constructions, verification and index certificates"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string configPath;
  app.add_option("--config", configPath, "JSON file with M and tolerance overrides")->check(CLI::ExistingFile);
  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--M", cfg.M, "samples along the fold (power of two, 64..8192)");
    sub->add_option("-o,--out", cfg.out, "output path (stdout if omitted)");
  };

  std::string cStr = "0", mStr = "1";
  auto* d1 = app.add_subcommand("degree1", "degree-1 family member u(c, m)");
  d1->add_option("--c", cStr, "complex parameter, |c| <= 0.99");
  d1->add_option("--m", mStr, "unit complex parametrization of the characteristic");
  addCommon(d1);

  std::string curvePath;
  auto* dd = app.add_subcommand("degree_d", "degree-d map from a curve file {p, q, m}");
  dd->add_option("--curve", curvePath, "curve JSON")->required()->check(CLI::ExistingFile);
  addCommon(dd);

  std::size_t steps = 8;
  double phi = 0.0;
  auto* cp = app.add_subcommand("compactify", "energy table along c = s e^{i phi}, s from 0 to 0.99");
  cp->add_option("--steps", steps, "number of rows (>= 2)");
  cp->add_option("--m", mStr, "unit complex parametrization");
  cp->add_option("--phi", phi, "direction of c");
  addCommon(cp);

  std::string bundlePath;
  auto* ce = app.add_subcommand("certificate", "ellipticity and index certificate from a bundle report");
  ce->add_option("--bundle", bundlePath, "report written by degree1 or degree_d")->required()->check(CLI::ExistingFile);
  addCommon(ce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  }

  try {
    bool mFromFlag = false;
    for (auto* sub : app.get_subcommands()) mFromFlag = mFromFlag || sub->count("--M") > 0;
    if (!configPath.empty()) apply_config_file(cfg, configPath, mFromFlag);
    cfg.validate();

    if (d1->parsed()) {
      const ModuliParam p{parse_complex(cStr), parse_complex(mStr)};
      p.validate();
      const auto b = degree1_family(p, cfg.M);
      return bundle_report(b, cfg, Json{{"c", to_json(p.c)}, {"m", to_json(p.m)}}, "degree1");
    }
    if (dd->parsed()) {
      const CurveInput curve = curve_from_json(read_json_file(curvePath));
      const auto b = construct_degree_d(curve, cfg.M);
      return bundle_report(b, cfg, to_json(curve), "degree_d");
    }
    if (cp->parsed()) {
      if (steps < 2) throw Error(ErrorKind::Input, "need at least 2 steps");
      std::vector<double> s(steps);
      for (std::size_t k = 0; k < steps; ++k) s[k] = 0.99 * static_cast<double>(k) / static_cast<double>(steps - 1);
      const auto rows = compactification_sample(s, parse_complex(mStr), phi, std::min<std::size_t>(cfg.M, 256));
      std::ostringstream os;
      os << "c_abs,E_uplus,E_uminus,E_total,limit_label\n";
      char buf[160];
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", r.cAbs, r.Eplus, r.Eminus, r.Etotal);
        os << buf << '"' << r.limitLabel << "\"\n";
      }
      emit(cfg, os.str());
      return kPass;
    }
    if (ce->parsed()) {
      const BoundaryImport imp = boundary_from_json(read_json_file(bundlePath));
      const Certificate cert = make_certificate(imp.data, imp.loops);
      Json j;
      j["schema"] = kSchema;
      j["command"] = "certificate";
      const Json cj = to_json(cert);
      for (auto it = cj.begin(); it != cj.end(); ++it) j[it.key()] = it.value();
      emit(cfg, dump17(j));
      if (!cert.pass) std::cerr << "certificate: FAIL at sample " << cert.failLocation << "\n";
      return cert.pass ? kPass : kVerifyFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kInputError;
}

}  // namespace folded::cli
