#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "ndis/csv.hpp"
#include "ndis/rng.hpp"

using namespace ndis;
using nlohmann::json;

namespace {

std::string tmp_path(const std::string& stem) {
  return std::string("cli_test_") + stem;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NDIS_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_synthetic(const std::string& path, int n, int d,
                     std::uint64_t seed, bool with_response) {
  RngStream s(seed);
  std::ofstream out(path);
  out.precision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      out << s.normal() << (j + 1 < d || with_response ? "," : "");
    if (with_response) out << s.normal();
    out << "\n";
  }
}

}  // namespace

TEST_CASE("load_csv") {
  {
    std::stringstream ss("1,0\n0,1\n");
    const CsvTable t = parse_csv(ss, "inline");
    CHECK(t.values.isApprox(Matrix::Identity(2, 2)));
    CHECK_FALSE(t.had_header);
  }
  {
    std::stringstream ss("x,y\n1,2\n3,4\n");
    const CsvTable t = parse_csv(ss, "inline");
    CHECK(t.had_header);
    CHECK(t.header.size() == 2);
    CHECK(t.values(1, 1) == 4.0);
  }
  {
    std::stringstream ss("1,2\n3\n");
    try {
      parse_csv(ss, "inline");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row == 2);
    }
  }
  {
    std::stringstream ss("");
    CHECK_THROWS_AS(parse_csv(ss, "inline"), EmptyInput);
  }
  {
    std::stringstream ss("1,nan\n");
    CHECK_THROWS_AS(parse_csv(ss, "inline"), ParseError);
  }
}

TEST_CASE("is-curve command") {
  const std::string in = tmp_path("curve_in.csv");
  const std::string out = tmp_path("curve_out.json");
  write_synthetic(in, 20, 3, 5, false);

  REQUIRE(run_cli("is-curve --mechanism rp --input " + in +
                  " --r 4 --eps-grid 0:2:5 --out " + out) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc.at("method") == "analytic");
  CHECK(doc.at("points").size() == 5);
  CHECK(doc.at("points")[0].at("eps") == 0.0);
  double prev = 2.0;
  for (const auto& pt : doc.at("points")) {
    CHECK(pt.at("delta").get<double>() <= prev + 1e-12);
    prev = pt.at("delta").get<double>();
  }
  CHECK(doc.contains("pair"));
  CHECK(doc.contains("seed"));

  // Byte-identical rerun, and the csv format round-trips through load_csv.
  const std::string out2 = tmp_path("curve_out2.json");
  REQUIRE(run_cli("is-curve --mechanism rp --input " + in +
                  " --r 4 --eps-grid 0:2:5 --out " + out2) == 0);
  CHECK(slurp(out) == slurp(out2));

  const std::string outc = tmp_path("curve_out.csv");
  REQUIRE(run_cli("is-curve --mechanism rlc --input " + in +
                  " --eps-grid 0:1:3 --format csv --out " + outc) == 0);
  const CsvTable round = load_csv(outc);
  CHECK(round.had_header);
  CHECK(round.values.rows() == 3);

  // Monte Carlo path needs a seed.
  CHECK(run_cli("is-curve --mechanism rp --input " + in +
                " --r 2 --eps-grid 0:1:2 --method mc --out " + out) != 0);
  REQUIRE(run_cli("is-curve --mechanism rp --input " + in +
                  " --r 2 --eps-grid 0:1:2 --method mc --seed 7 --alpha 0.05 "
                  "--gamma 0.1 --out " + out) == 0);
  CHECK(json::parse(slurp(out)).at("method") == "mc");

  std::remove(in.c_str());
  std::remove(out.c_str());
  std::remove(out2.c_str());
  std::remove(outc.c_str());
}

TEST_CASE("mechanism command") {
  const std::string in = tmp_path("mech_in.csv");
  write_synthetic(in, 25, 2, 6, false);
  const std::string o1 = tmp_path("mech1.json");
  const std::string o2 = tmp_path("mech2.json");

  REQUIRE(run_cli("mechanism --mechanism rp --input " + in +
                  " --eps 1 --r 3 --seed 11 --out " + o1) == 0);
  REQUIRE(run_cli("mechanism --mechanism rp --input " + in +
                  " --eps 1 --r 3 --seed 11 --out " + o2) == 0);
  CHECK(slurp(o1) == slurp(o2));  // determinism contract

  const json doc = json::parse(slurp(o1));
  CHECK(doc.at("delta") == doctest::Approx(1.0 / 25.0));  // default 1/n
  CHECK(doc.at("s_bar").get<double>() > 0.0);
  CHECK(doc.at("sigma").get<double>() > 0.0);
  CHECK(doc.at("output").size() == 2);

  // Relative variant records the branch decision.
  const std::string o3 = tmp_path("mech3.json");
  REQUIRE(run_cli("mechanism --mechanism rp-rel --input " + in +
                  " --eps 1 --r 3 --seed 11 --out " + o3) == 0);
  const json rel = json::parse(slurp(o3));
  CHECK(rel.contains("branch"));
  CHECK(rel.contains("set_leverage"));

  // Norm violation surfaces as exit code 2.
  CHECK(run_cli("mechanism --mechanism rp --input " + in +
                " --eps 1 --r 3 --seed 11 --l 0.01 --out " + o3) == 2);

  // Invalid delta is a validation error.
  CHECK(run_cli("mechanism --mechanism ls --input " + in +
                " --eps 1 --delta 1.5 --r 50 --seed 3 --out " + o3) == 1);

  std::remove(in.c_str());
  std::remove(o1.c_str());
  std::remove(o2.c_str());
  std::remove(o3.c_str());
}

TEST_CASE("ls mechanism and metrics") {
  const std::string in = tmp_path("ls_in.csv");
  write_synthetic(in, 30, 3, 8, true);  // regression layout, last col response
  const std::string out = tmp_path("ls_out.json");

  REQUIRE(run_cli("mechanism --mechanism ls --input " + in +
                  " --eps 1 --r 100 --seed 21 --out " + out) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc.at("sigma").get<double>() > 0.0);
  CHECK(doc.at("output").size() == 2);  // d = columns - 1

  REQUIRE(run_cli("metrics --mechanism ls --input " + in +
                  " --eps 1 --r 100 --seed 21 --trials 5 --out " + out) == 0);
  const json met = json::parse(slurp(out));
  CHECK(met.at("error").at("mean").get<double>() > 0.0);
  CHECK(met.at("trials") == 5);

  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("metrics identity projection sanity") {
  const std::string in = tmp_path("metrics_in.csv");
  write_synthetic(in, 200, 4, 9, false);
  const std::string out = tmp_path("metrics_out.json");

  // Unnoised relative branch at a generous delta approximates a plain
  // projection; PDR should hover near 1 at a healthy r.
  REQUIRE(run_cli("metrics --mechanism rp-rel --input " + in +
                  " --eps 1 --delta 0.9 --r 530 --seed 31 --trials 10 --out " +
                  out) == 0);
  const json doc = json::parse(slurp(out));
  const double pdr = doc.at("pdr").at("mean").get<double>();
  CHECK(pdr > 0.9);
  CHECK(pdr < 1.1);
  CHECK(doc.at("dpr").at("mean").get<double>() > 0.5);

  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("gl command") {
  const std::string in = tmp_path("gl_in.csv");
  {
    std::ofstream out(in);
    out << "1,0,0\n0,1,0\n0,0,1\n2,0,0\n";  // witness universe at eps = 0.2
  }
  const std::string out = tmp_path("gl_out.json");
  REQUIRE(run_cli("gl --input " + in + " --k 4 --seed 3 --out " + out) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc.at("exact").at("value").get<double>() == doctest::Approx(0.8));
  CHECK(doc.at("greedy").at("value").get<double>() == doctest::Approx(0.8));
  CHECK(doc.at("bcd").at("value").get<double>() == doctest::Approx(0.8));

  std::remove(in.c_str());
  std::remove(out.c_str());
}
