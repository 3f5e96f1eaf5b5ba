#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "folded/cli.hpp"
#include "folded/io.hpp"

using namespace folded;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "folded_cli");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, ParseComplex) {
  EXPECT_EQ(cli::parse_complex("0.5"), cplx(0.5, 0.0));
  EXPECT_EQ(cli::parse_complex("0.6+0.8i"), cplx(0.6, 0.8));
  EXPECT_EQ(cli::parse_complex("-0.2-0.3i"), cplx(-0.2, -0.3));
  EXPECT_EQ(cli::parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(cli::parse_complex("-2.5j"), cplx(0.0, -2.5));
  EXPECT_EQ(cli::parse_complex("1e-3+1e-3i"), cplx(1e-3, 1e-3));
  EXPECT_THROW(cli::parse_complex("abc"), Error);
}

TEST(Cli, Dump17RoundTrips) {
  const double x = 0.1 + 0.2, y = 1.0 / 3.0;
  Json j{{"x", x}, {"v", Json::array({y, -1e-300})}, {"n", 3}};
  const Json back = Json::parse(dump17(j));
  EXPECT_EQ(back["x"].get<double>(), x);
  EXPECT_EQ(back["v"][0].get<double>(), y);
  EXPECT_EQ(back["v"][1].get<double>(), -1e-300);
  EXPECT_NE(dump17(j).find("0.30000000000000004"), std::string::npos);
}

TEST(Cli, DeterministicReports) {
  const std::string a = tmp("folded_det_a.json"), b = tmp("folded_det_b.json");
  ASSERT_EQ(run_cli({"degree1", "--c", "0.3-0.4i", "--m", "0.6+0.8i", "--M", "256", "-o", a}), 0);
  ASSERT_EQ(run_cli({"degree1", "--c", "0.3-0.4i", "--m", "0.6+0.8i", "--M", "256", "-o", b}), 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, CertificateRoundTrip) {
  const std::string rep = tmp("folded_cert_rep.json"), cert = tmp("folded_cert.json");
  ASSERT_EQ(run_cli({"degree1", "--c", "0.5", "--m", "1", "--M", "256", "-o", rep}), 0);
  ASSERT_EQ(run_cli({"certificate", "--bundle", rep, "-o", cert}), 0);
  const Json r = read_json_file(rep), c = read_json_file(cert);
  EXPECT_EQ(c["schema"], kSchema);
  for (const char* key : {"sigmaMin", "aMin", "homotopyMin", "maslovPlus", "maslovMinus", "index", "reducedIndex"})
    EXPECT_EQ(c[key], r["certificate"][key]) << key;

  // a damaged gap function fails with the sample located
  Json bad = r;
  bad["boundary"]["a"][40] = 0.0;
  const std::string badPath = tmp("folded_cert_bad.json");
  std::ofstream(badPath) << dump17(bad);
  EXPECT_EQ(run_cli({"certificate", "--bundle", badPath, "-o", cert}), 2);
  const Json cf = read_json_file(cert);
  EXPECT_EQ(cf["status"], "FAIL");
  EXPECT_EQ(cf["failSample"], 40);

  Json noSchema = r;
  noSchema.erase("schema");
  std::ofstream(badPath) << dump17(noSchema);
  EXPECT_EQ(run_cli({"certificate", "--bundle", badPath}), 1);
}

TEST(Cli, DegreeDMatchesDegree1) {
  const std::string a = tmp("folded_eq_a.json"), b = tmp("folded_eq_b.json"), curve = tmp("folded_eq_curve.json");
  std::ofstream(curve) << R"({"p": [[0, 0], [1, 0]], "q": [[0.5, 0]], "m": [1, 0]})";
  ASSERT_EQ(run_cli({"degree1", "--c", "0.5", "--m", "1", "--M", "256", "-o", a}), 0);
  ASSERT_EQ(run_cli({"degree_d", "--curve", curve, "--M", "256", "-o", b}), 0);
  const Json ja = read_json_file(a), jb = read_json_file(b);
  for (const char* key : {"uPlus", "uMinus", "vPlus", "vMinus", "total"})
    EXPECT_NEAR(ja["energies"][key].get<double>(), jb["energies"][key].get<double>(), 1e-7) << key;
  const auto& A = ja["boundary"], &B = jb["boundary"];
  for (std::size_t k = 0; k < A["a"].size(); ++k) {
    EXPECT_NEAR(A["a"][k].get<double>(), B["a"][k].get<double>(), 1e-7);
    EXPECT_NEAR(A["fChi"][k].get<double>(), B["fChi"][k].get<double>(), 1e-7);
  }
  EXPECT_EQ(ja["certificate"]["reducedIndex"], jb["certificate"]["reducedIndex"]);
}

TEST(Cli, CompactifyTable) {
  const std::string path = tmp("folded_compact.csv");
  ASSERT_EQ(run_cli({"compactify", "--steps", "8", "--m", "1", "-o", path}), 0);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "c_abs,E_uplus,E_uminus,E_total,limit_label");
  std::vector<double> up, tot;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    for (int k = 0; k < 4 && std::getline(row, cell, ','); ++k) cells.push_back(cell);
    std::getline(row, cell);
    cells.push_back(cell);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_EQ(cells[4], "\"(0,1+0i)\"");
    up.push_back(std::stod(cells[1]));
    tot.push_back(std::stod(cells[3]));
  }
  ASSERT_EQ(up.size(), 8u);
  for (std::size_t k = 1; k < up.size(); ++k) EXPECT_LT(up[k], up[k - 1]);
  double mean = 0.0, var = 0.0;
  for (double t : tot) mean += t / tot.size();
  for (double t : tot) var += (t - mean) * (t - mean) / tot.size();
  EXPECT_LT(std::sqrt(var), 1e-6);
}
