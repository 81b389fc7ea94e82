// Runs the roy-exact binary end to end.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "core/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ROY_EXACT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("roy_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("cdf writes a monotone curve and a manifest") {
  TempDir dir("cdf");
  const Run r = run("cdf --p 1000 --m 100 --q 6 --method exact --grid-points 64 --out " + dir.str());
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(dir.path / "cdf.csv");
  REQUIRE(csv.rfind("x,F\n", 0) == 0);
  const roy::Matrix m = roy::parse_csv_matrix(csv.substr(4));
  REQUIRE(m.rows() == 64);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 0.0);
  for (roy::Index i = 1; i < m.rows(); ++i) {
    CHECK(m(i, 1) >= m(i - 1, 1));
    CHECK(m(i, 1) <= 1.0);
  }
  CHECK(m(63, 1) == doctest::Approx(0.9999).epsilon(1e-6));
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest.contains("version"));
}

TEST_CASE("cdf argument errors") {
  TempDir dir("cdf_err");
  CHECK(run("cdf --p 1000 --m 96 --q 4 --method theorem2 --out " + dir.str()).exit_code == 2);
  CHECK(run("cdf --p 1000 --m 96 --q 4 --method exact --b 0.9 --out " + dir.str()).exit_code == 2);
  CHECK(run("cdf --p 50 --m 50 --q 4 --out " + dir.str()).exit_code == 2);
  CHECK(run("cdf --p 1000 --m 300 --q 200 --method exact --out " + dir.str()).exit_code == 3);
  CHECK(run("cdf --p 1000 --m 96 --q 4 --method bogus").exit_code == 2);
  CHECK(run("").exit_code == 2);
}

TEST_CASE("pvalue prints JSON") {
  const Run zero = run("pvalue --p 1000 --m 100 --q 6 --stat 0");
  REQUIRE(zero.exit_code == 0);
  const auto j = nlohmann::json::parse(zero.out);
  CHECK(j.at("p_value").get<double>() == 1.0);
  CHECK(j.at("method").get<std::string>() == "exact");

  const Run exact = run("pvalue --p 1000 --m 100 --q 6 --stat 0.16 --method exact");
  const Run tw = run("pvalue --p 1000 --m 100 --q 6 --stat 0.16 --method tw");
  REQUIRE(exact.exit_code == 0);
  REQUIRE(tw.exit_code == 0);
  const double pe = nlohmann::json::parse(exact.out).at("p_value").get<double>();
  const double pt = nlohmann::json::parse(tw.out).at("p_value").get<double>();
  CHECK(std::abs(pe - pt) <= 0.05);
  CHECK(run("pvalue --p 1000 --m 100 --q 6 --stat -1").exit_code == 2);
}

TEST_CASE("pvalue estimates b from data") {
  TempDir dir("pvalue_data");
  // 30 x 4 factor with orthogonal unit columns.
  std::ofstream csv(dir.path / "z.csv");
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 4; ++j) csv << (i % 4 == j ? 1.0 : 0.0) << (j < 3 ? "," : "\n");
  }
  csv.close();
  const Run r = run("pvalue --p 30 --m 4 --q 2 --stat 1.0 --data " + (dir.path / "z.csv").string());
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("method").get<std::string>() == "theorem2");
  CHECK(j.at("b_used").get<double>() > 0.0);
  CHECK(run("pvalue --p 30 --m 4 --q 2 --stat 1.0 --data /nonexistent.csv").exit_code == 2);
}

TEST_CASE("simulate is byte-identical across worker counts") {
  TempDir one("sim1"), eight("sim8");
  const std::string common = "simulate --p 60 --m 10 --q 3 --n-sims 500 --seed 9 ";
  REQUIRE(run(common + "--workers 1 --out " + one.str()).exit_code == 0);
  REQUIRE(run(common + "--workers 8 --out " + eight.str()).exit_code == 0);
  const std::string a = slurp(one.path / "empirical.csv");
  CHECK(a.size() > 100);
  CHECK(a == slurp(eight.path / "empirical.csv"));
}

TEST_CASE("simulate with a degenerate scale hits the resample cap") {
  TempDir dir("sim_cap");
  std::ofstream csv(dir.path / "sigma.csv");
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) csv << (i == j ? (i < 2 ? "1" : "1e-300") : "0") << (j < 19 ? "," : "\n");
  }
  csv.close();
  CHECK(run("simulate --p 20 --m 5 --q 2 --n-sims 10 --sigma " + (dir.path / "sigma.csv").string() + " --out " +
            dir.str())
            .exit_code == 4);
}

TEST_CASE("validate with too few draws reports and fails") {
  TempDir dir("validate");
  const Run r = run("validate --figure t1 --n-sims 10 --p-values 500,2000 --batches 2 --out " + dir.str());
  CHECK(r.exit_code == 5);
  const std::string summary = slurp(dir.path / "summary.csv");
  CHECK(summary.rfind("figure,p,m,q,n,metric,value,threshold,pass\n", 0) == 0);
  CHECK(fs::exists(dir.path / "manifest.json"));
}
