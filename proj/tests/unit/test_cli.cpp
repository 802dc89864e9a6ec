#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isolab/circle.hpp"
#include "isolab/error.hpp"
#include "isolab_cli/commands.hpp"
#include "isolab_cli/parse.hpp"

using namespace isolab;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::vector<double> column(const std::string& text, std::size_t col) {
  std::vector<double> out;
  const auto rows = csv_rows(text);
  for (std::size_t r = 1; r < rows.size(); ++r) out.push_back(std::stod(rows[r].at(col)));
  return out;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(ISOLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_diffeo_spec examples") {
  const Diffeo r = cli::parse_diffeo_spec("rot:0.25");
  CHECK(r.is_rotation());
  CHECK(r.lift(0.1) == doctest::Approx(0.35));

  const Diffeo p = cli::parse_diffeo_spec("pow(rot:0.1,3)");
  for (double x : {0.0, 0.4, 0.8}) CHECK(p.lift(x) == doctest::Approx(x + 0.3));

  const Diffeo c = cli::parse_diffeo_spec("conj(shear:0.5:1, rot:0.618)");
  CHECK(rotation_number(c, 20000) == doctest::Approx(0.618).epsilon(1e-3));
  const Diffeo h = Diffeo::sine_shear(0.5, 1);
  const Diffeo want = conjugate(h, Diffeo::rotation(0.618));
  for (double x : {0.1, 0.7}) CHECK(c.lift(x) == doctest::Approx(want.lift(x)));

  const Diffeo nested = cli::parse_diffeo_spec(" comp( inv(shear:-0.2:3) , pow(shear:0.1:2, -2) ) ");
  const Diffeo ref = compose(inverse(Diffeo::sine_shear(-0.2, 3)), power(Diffeo::sine_shear(0.1, 2), -2));
  CHECK(nested.lift(0.33) == doctest::Approx(ref.lift(0.33)));
  CHECK(cli::parse_diffeo_spec(c.describe()).lift(0.2) == doctest::Approx(c.lift(0.2)));
}

TEST_CASE("parse errors carry a position") {
  for (const char* bad : {"rot", "rot:x", "shear:0.5", "comp(rot:0.1)", "pow(rot:0.1,)", "rot:0.1 junk", "wat(rot:0.1)", ""}) {
    try {
      cli::parse_diffeo_spec(bad);
      FAIL("accepted " << bad);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(cli::parse_diffeo_spec("shear:1.0:1"), ValidationError);
  CHECK_THROWS_AS(cli::parse_diffeo_spec("shear:0.5:0"), ValidationError);
}

TEST_CASE("parse_times") {
  CHECK(cli::parse_times("fib:5") == std::vector<int>{1, 2, 3, 5, 8});
  CHECK(cli::parse_times("2..5") == std::vector<int>{2, 3, 4, 5});
  CHECK(cli::parse_times("0..10:5") == std::vector<int>{0, 5, 10});
  CHECK(cli::parse_times("1,4,9") == std::vector<int>{1, 4, 9});
  CHECK(cli::parse_times("fib:3,100") == std::vector<int>{1, 2, 3, 100});
  CHECK_THROWS_AS(cli::parse_times("5..1"), ValidationError);
  CHECK_THROWS_AS(cli::parse_times("a,b"), ValidationError);
  CHECK_THROWS_AS(cli::parse_times(""), ValidationError);
}

TEST_CASE("recur example has a strictly decreasing tail") {
  const Result r = run({"recur", "--diffeo", "conj(shear:0.5:1, rot:0.6180339887)", "--space", "c0", "--times", "fib:10"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("time,residual\n", 0) == 0);
  const auto t = column(r.out, 0);
  CHECK(t == std::vector<double>{1, 2, 3, 5, 8, 13, 21, 34, 55, 89});
  const auto res = column(r.out, 1);
  for (std::size_t k = 2; k + 1 < res.size(); ++k) CHECK(res[k + 1] < res[k]);
}

TEST_CASE("blowup-demo example ends above a thousand") {
  const Result r = run({"blowup-demo", "--p", "1", "--q", "3", "--eps", "0.1", "--nmax", "300"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("n,crossratio,implied_chi_lower\n", 0) == 0);
  const auto n = column(r.out, 0);
  const auto cr = column(r.out, 1);
  const auto chi = column(r.out, 2);
  CHECK(n.front() == 3);
  CHECK(n.back() == 300);
  CHECK(cr.back() > 1e3);
  CHECK(chi.back() == doctest::Approx((std::sqrt(std::log(cr.back())) - std::sqrt(std::log(2.0))) / 2));

  const Result j = run({"blowup-demo", "--nmax", "300", "--format", "json"});
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["exceeds_chi_1"] == true);
  CHECK(doc["implied_chi_lower"].get<double>() > 1.0);
}

TEST_CASE("edelstein example has a decreasing residual column") {
  const Result r = run({"edelstein", "--dim", "50", "--scan", "2..10"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("n,factorial,residual", 0) == 0);
  const auto res = column(r.out, 2);
  REQUIRE(res.size() == 9);
  for (std::size_t k = 0; k + 1 < res.size(); ++k) CHECK(res[k + 1] < res[k]);
}

TEST_CASE("every subcommand succeeds with csv and json") {
  const std::vector<std::vector<std::string>> cmds{
      {"rotnum", "--diffeo", "rot:0.3"},
      {"cf", "--rho", "0.6180339887", "--depth", "5"},
      {"cf", "--diffeo", "conj(shear:0.5:1,rot:0.6180339887)", "--depth", "4"},
      {"cocycle-check", "--g1", "shear:0.3:1", "--g2", "rot:0.41", "--kind", "projective", "--p", "2", "--samples", "100"},
      {"recur", "--diffeo", "rot:0.3", "--space", "l2", "--times", "1,2", "--vector", "cosdiff", "--n", "16"},
      {"recur", "--diffeo", "rot:0.3", "--times", "cf", "--n", "64"},
      {"drift", "--diffeo", "conj(shear:0.5:1,rot:0.6180339887)", "--nmax", "5", "--n", "64"},
      {"fixedpoint", "--h", "shear:0.5:1", "--n", "256"},
      {"conjugacy", "--h", "shear:0.5:1", "--n", "256", "--points", "10"},
      {"euclid", "--preset", "rot90", "--nmax", "3"},
      {"euclid", "--dim", "5", "--seed", "3", "--nmax", "3"},
      {"edelstein", "--dim", "10", "--scan", "2..4"},
      {"crossratio-scan", "--diffeo", "rot:0.1", "--times", "1,2"},
      {"blowup-demo", "--nmax", "30"},
      {"commute", "--h", "shear:0.5:1", "--rho", "0.618,0.414", "--n", "64"}};
  for (const auto& c : cmds) {
    CAPTURE(c[0]);
    const Result r = run(c);
    CHECK(r.code == cli::kExitOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() >= 2);
    for (const std::string& h : rows[0]) CHECK(std::isalpha(static_cast<unsigned char>(h[0])));
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].size() == rows[0].size());

    auto with_json = c;
    with_json.insert(with_json.end(), {"--format", "json"});
    const Result j = run(with_json);
    CHECK(j.code == cli::kExitOk);
    CHECK_NOTHROW(nlohmann::json::parse(j.out));
  }
}

TEST_CASE("outputs are deterministic") {
  const std::vector<std::string> a{"euclid", "--dim", "7", "--seed", "11", "--nmax", "20"};
  CHECK(run(a).out == run(a).out);
  const std::vector<std::string> b{"edelstein", "--dim", "20", "--scan", "2..6", "--vnorm", "3", "--seed", "5"};
  CHECK(run(b).out == run(b).out);
}

TEST_CASE("--out writes to a file") {
  const auto path = std::filesystem::temp_directory_path() / "isolab_cli_test.csv";
  std::filesystem::remove(path);
  const Result r = run({"rotnum", "--diffeo", "rot:0.3", "--out", path.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "diffeo,iters,rho,error_bound");
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  CHECK(run({"rotnum", "--diffeo", "shear:1.5:1"}).code == cli::kExitValidation);
  CHECK(run({"rotnum", "--diffeo", "rot(0.2"}).code == cli::kExitValidation);
  CHECK(run({"recur", "--diffeo", "rot:0.2", "--space", "nope"}).code == cli::kExitValidation);
  CHECK(run({"recur", "--diffeo", "rot:0.2", "--n", "100"}).code == cli::kExitValidation);
  CHECK(run({"recur", "--diffeo", "rot:0.2", "--format", "xml"}).code == cli::kExitValidation);
  CHECK(run({"nosuch"}).code == cli::kExitValidation);
  CHECK(run({"commute", "--h", "shear:0.5:1", "--rho", "0.3,0.3"}).code == cli::kExitValidation);
  CHECK(run({"blowup-demo", "--q", "2"}).code == cli::kExitValidation);
  const Result bad = run({"crossratio-scan", "--diffeo", "rot:0.1", "--a", "0", "--b", "1e-300", "--c", "2e-300", "--times", "1"});
  CHECK(bad.code == cli::kExitNumerical);
  CHECK_FALSE(bad.err.empty());
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("the installed binary reports the same exit codes") {
  CHECK(run_binary("rotnum --diffeo rot:0.3") == 0);
  CHECK(run_binary("rotnum --diffeo 'shear:1.5:1'") == 2);
  CHECK(run_binary("crossratio-scan --diffeo rot:0.1 --a 0 --b 1e-300 --c 2e-300 --times 1") == 3);
}
