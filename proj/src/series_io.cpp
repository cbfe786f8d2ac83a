#include "teis/series_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "teis/errors.hpp"

namespace teis {

std::string format_decimal(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_decimal(const std::string& s, const std::string& field) {
  const char* p = s.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(p, &end);
  if (s.empty() || end != p + s.size() || errno == ERANGE || !std::isfinite(v))
    throw InvalidArgument("malformed decimal in " + field + ": \"" + s + "\"");
  return v;
}

namespace {

double number_field(const nlohmann::json& v, const std::string& field) {
  if (v.is_string()) return parse_decimal(v.get<std::string>(), field);
  if (v.is_number()) return v.get<double>();
  throw InvalidArgument(field + " must be a decimal string");
}

}  // namespace

nlohmann::json series_to_json(const FourierSeries& f) {
  nlohmann::json j;
  j["level"] = f.level();
  j["weight"] = f.weight();
  auto coeffs = nlohmann::json::array();
  auto errs = nlohmann::json::array();
  for (i64 n = 0; n <= f.degree(); ++n) {
    coeffs.push_back({format_decimal(f[n].real()), format_decimal(f[n].imag())});
    errs.push_back(format_decimal(f.error_bounds()[n]));
  }
  j["coefficients"] = std::move(coeffs);
  j["error_bound"] = format_decimal(f.max_error_bound());
  j["error_bounds"] = std::move(errs);
  return j;
}

FourierSeries series_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("series document must be an object");
  for (const char* key : {"level", "weight", "coefficients"})
    if (!j.contains(key)) throw InvalidArgument(std::string("series document lacks field \"") + key + "\"");
  if (!j["level"].is_number_integer() || !j["weight"].is_number_integer())
    throw InvalidArgument("level and weight must be integers");
  const auto& cs = j["coefficients"];
  if (!cs.is_array()) throw InvalidArgument("coefficients must be an array");
  std::vector<cplx> a;
  a.reserve(cs.size());
  for (std::size_t n = 0; n < cs.size(); ++n) {
    const std::string field = "coefficients[" + std::to_string(n) + "]";
    const auto& e = cs[n];
    if (e.is_array()) {
      if (e.size() != 2) throw InvalidArgument(field + " must be [re, im]");
      a.emplace_back(number_field(e[0], field), number_field(e[1], field));
    } else {
      a.emplace_back(number_field(e, field), 0.0);
    }
  }
  std::vector<double> err(a.size(), 0.0);
  if (j.contains("error_bounds")) {
    const auto& es = j["error_bounds"];
    if (!es.is_array() || es.size() != a.size())
      throw InvalidArgument("error_bounds must be an array matching coefficients");
    for (std::size_t n = 0; n < a.size(); ++n) err[n] = number_field(es[n], "error_bounds");
  } else if (j.contains("error_bound")) {
    double e = number_field(j["error_bound"], "error_bound");
    err.assign(a.size(), e);
  }
  return FourierSeries(j["level"].get<i64>(), j["weight"].get<int>(), std::move(a), std::move(err));
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("parse error in " + path + ": " + e.what());
  }
}

FourierSeries read_series_file(const std::string& path) {
  auto j = read_json_file(path);
  try {
    return series_from_json(j);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace teis
