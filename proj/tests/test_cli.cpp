#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "teis/cli.hpp"
#include "teis/errors.hpp"

using namespace teis;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "teis");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("tau parsing") {
  CHECK(cli::parse_tau("0.2+1.4i") == std::complex<double>(0.2, 1.4));
  CHECK(cli::parse_tau("-0.5+2i") == std::complex<double>(-0.5, 2));
  CHECK_THROWS_AS(cli::parse_tau("0.5-2i"), InvalidArgument);
  CHECK(cli::parse_tau("0.1,3") == std::complex<double>(0.1, 3));
  CHECK(cli::parse_tau("0 1") == std::complex<double>(0, 1));
  CHECK_THROWS_AS(cli::parse_tau("i"), InvalidArgument);
}

TEST_CASE("qexp with the zero form uses exact values") {
  Result r = run({"qexp", "--level", "11", "--weight", "4", "--twist-index", "1", "--terms", "10"});
  REQUIRE(r.code == cli::kOk);
  json d = r.doc();
  CHECK(d["tail_bound"] == "exact");
  const json& c = d["expansions"][0]["coefficients"][1];
  CHECK(c["m"] == 1);
  CHECK(c["rational"] == "3/29282");
  CHECK(c["error_bound"] == "0");
  CHECK(parse_decimal(c["re"].get<std::string>()) == 3.0 / 29282);
  CHECK(d["expansions"][0]["coefficients"].size() == 11);
}

TEST_CASE("output file and csv") {
  const std::string path = "test_cli_qexp.csv";
  Result r = run({"qexp", "--level", "1", "--twist-index", "0", "--terms", "2", "--format", "csv", "--out", path});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.empty());
  const std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.rfind("twist_index,m,re,im,error_bound,rational\n", 0) == 0);
  CHECK(text.find("0,0,") != std::string::npos);
  CHECK(text.find("1/720") != std::string::npos);
}

TEST_CASE("output is deterministic") {
  std::vector<std::string> args = {"qexp", "--level", "11", "--form", "eta11", "--twist-index", "1", "--terms", "3",
                                   "--target-error", "1e-6"};
  Result a = run(args), b = run(args);
  REQUIRE(a.code == cli::kOk);
  CHECK(a.out == b.out);
  json d = a.doc();
  CHECK(d["tail_bound"] != "exact");
  for (const auto& c : d["expansions"][0]["coefficients"])
    CHECK(parse_decimal(c["error_bound"].get<std::string>()) <= 1e-6);
}

TEST_CASE("eval: odd weight at level one") {
  Result r = run({"eval", "--level", "1", "--weight", "3", "--tau", "0.2+1.4i"});
  REQUIRE(r.code == cli::kOk);
  const json v = r.doc()["values"][0];
  CHECK(parse_decimal(v["re"].get<std::string>()) == 0.0);
  CHECK(parse_decimal(v["error_bound"].get<std::string>()) < 1e-8);
}

TEST_CASE("configuration errors") {
  Result r = run({"qexp", "--weight", "2"});
  CHECK(r.code == cli::kInvalidConfig);
  CHECK(r.err.find("k >= 3") != std::string::npos);
  CHECK(run({"qexp", "--bogus"}).code == cli::kInvalidConfig);
  CHECK(run({"eval", "--level", "11"}).code == cli::kInvalidConfig);
  CHECK(run({"qexp", "--level", "14", "--form", "eta11"}).code == cli::kInvalidConfig);
  CHECK(run({"qexp", "--format", "xml"}).code == cli::kInvalidConfig);
  Result io = run({"qexp", "--form", "/nonexistent/h.json"});
  CHECK(io.code == cli::kIoError);
  CHECK(io.err.find("/nonexistent/h.json") != std::string::npos);
}

TEST_CASE("a form file that is not a cusp form is rejected") {
  const std::string path = "test_cli_bad_form.json";
  {
    std::ofstream out(path);
    out << R"({"level": 11, "weight": 2, "coefficients": ["1", "1", "-2"]})";
  }
  Result r = run({"qexp", "--form", path, "--terms", "2"});
  std::remove(path.c_str());
  CHECK(r.code == cli::kInvalidConfig);
  CHECK(r.err.find("a_0") != std::string::npos);
}

TEST_CASE("precision limits map to their exit code") {
  Result r = run({"eval", "--level", "11", "--tau", "0.1+0.9i", "--target-error", "1e-14", "--max-radius", "50"});
  CHECK(r.code == cli::kPrecisionUnreachable);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("periods and trivializing scalar") {
  Result r = run({"periods", "--form", "eta11", "--target-error", "1e-10"});
  REQUIRE(r.code == cli::kOk);
  json d = r.doc();
  CHECK(d["trivialization"]["kind"] == "discrete");
  CHECK(std::fabs(parse_decimal(d["trivialization"]["generator"].get<std::string>()) - 1 / 0.23217787565036) < 1e-7);
  CHECK(d["re_periods"].size() >= 4);
}

TEST_CASE("form command writes the shipped cusp form") {
  const std::string path = "test_cli_form.json";
  Result r = run({"form", "--level", "11", "--eta", "1:4,11:4", "--terms", "400", "--fricke-sign", "1", "--out", path});
  REQUIRE(r.code == cli::kOk);
  json a = read_json_file(path), b = read_json_file(test::data_path("cusp_l11_k4.json"));
  std::remove(path.c_str());
  CHECK(a == b);
  CHECK(run({"form", "--level", "11", "--eta", "1:3"}).code == cli::kInvalidConfig);
}

TEST_CASE("scan without twist") {
  Result r = run({"scan", "--level", "11", "--terms", "2", "--tol", "1e-12"});
  REQUIRE(r.code == cli::kOk);
  json d = r.doc();
  std::size_t series = 0;
  for (const auto& e : d["entries"]) {
    if (e["kind"] != "series") continue;
    ++series;
    auto q = test::exact_quotient(11, 4, e["i"], e["j"], 2)[e["m"].get<i64>()];
    if (denominator(q) > 1000000) continue;
    CHECK(e["verdict"] == "rational");
    CHECK(e["rational"] == q.str());
  }
  CHECK(series == 11 * 11 * 3);
}

TEST_CASE("check suite at level one") {
  Result r = run({"check", "--level", "1", "--weight", "4", "--terms", "3"});
  CHECK(r.code == cli::kOk);
  json d = r.doc();
  CHECK(d["pass"] == true);
  for (const auto& c : d["checks"]) CHECK(c["pass"] == true);
}
