#include "teis/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "teis/cuspform.hpp"
#include "teis/eisenstein.hpp"
#include "teis/errors.hpp"
#include "teis/jacobian.hpp"
#include "teis/series_io.hpp"

namespace teis::cli {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

// Check-suite thresholds.
constexpr double kOracleThreshold = 1e-8;
constexpr double kDedekindThreshold = 1e-5;
constexpr double kModularityThreshold = 1e-5;
constexpr double kRealityThreshold = 1e-6;
constexpr double kCharacterThreshold = 1e-8;

std::string dec(double x) { return format_decimal(x); }

json cplx_json(cplx z, double err) { return {{"re", dec(z.real())}, {"im", dec(z.imag())}, {"error_bound", dec(err)}}; }

std::string bound_kind(const FourierSeries& h) { return h.is_zero() ? "rigorous" : "heuristic-hecke"; }

FourierSeries load_form(const RunConfig& c) {
  const i64 nq = std::min<i64>(c.budget.max_q_terms, 400000);
  FourierSeries h = [&] {
    if (c.form == "zero") return zero_form(c.level, 1);
    for (i64 l : {11, 14, 15})
      if (c.form == "eta" + std::to_string(l)) {
        if (c.level != l)
          throw InvalidArgument("--form " + c.form + " has level " + std::to_string(l) + ", --level is " +
                                std::to_string(c.level));
        return eta_product_weight2(l, nq);
      }
    return read_series_file(c.form);
  }();
  if (h.level() != c.level)
    throw InvalidArgument("form " + c.form + " has level " + std::to_string(h.level()) + ", --level is " +
                          std::to_string(c.level));
  h.require_weight2_cusp_form(("form " + c.form).c_str());
  return h;
}

std::shared_ptr<const Twist> make_twist(const FourierSeries& h, const RunConfig& c) {
  return std::make_shared<Twist>(h, 1e-13, c.budget.max_q_terms);
}

std::vector<i64> indices(const RunConfig& c) {
  if (!c.all_indices) return c.twist_indices;
  std::vector<i64> v(c.level);
  for (i64 i = 0; i < c.level; ++i) v[i] = i;
  return v;
}

void require_series_weight(const RunConfig& c) {
  if (c.weight < 3)
    throw InvalidArgument("weight k = " + std::to_string(c.weight) +
                          " is unsupported; the lattice sum converges absolutely only for k >= 3");
}

// Scale chosen by the config: a fixed multiple, or the generator of the trivializing scalars.
FourierSeries scaled_form(const RunConfig& c, const FourierSeries& h, json& info) {
  double lambda = c.form_scale;
  if (c.trivializing_scale) {
    auto ts = trivialization_scalars(TwistPoint::make(h, c.budget), c.max_height);
    if (ts.kind != TrivializationScalars::Kind::Discrete)
      throw InvalidArgument(std::string("--trivializing: scalars are ") + to_string(ts.kind) +
                            ", no generator to scale by");
    lambda = ts.generator;
    info["scale_error_bound"] = dec(ts.generator_error);
  }
  info["scale"] = dec(lambda);
  return lambda == 1.0 ? h : h.scaled(lambda);
}

void emit(const RunConfig& c, std::ostream& out, const json& report, const std::string& csv) {
  std::string text = c.format == "csv" ? csv : report.dump(2) + "\n";
  if (c.out.empty())
    out << text;
  else
    write_text_file(c.out, text);
}

json config_json(const RunConfig& c) {
  json j = {{"command", c.command},
            {"level", c.level},
            {"weight", c.weight},
            {"form", c.form},
            {"terms", c.terms},
            {"target_error", dec(c.budget.target_abs_error)},
            {"max_lattice_radius", c.budget.max_lattice_radius},
            {"max_c_terms", c.budget.max_c_terms},
            {"max_q_terms", c.budget.max_q_terms}};
  if (c.tau) j["tau"] = {{"re", dec(c.tau->real())}, {"im", dec(c.tau->imag())}};
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (level < 1) throw InvalidArgument("--level must be >= 1");
  if (terms < 0) throw InvalidArgument("--terms must be >= 0");
  if (format != "json" && format != "csv") throw InvalidArgument("--format must be json or csv");
  if (threads < 1) throw InvalidArgument("--threads must be >= 1");
  if (!std::isfinite(form_scale)) throw InvalidArgument("--scale must be finite");
  budget.validate();
}

std::complex<double> parse_tau(const std::string& s) {
  static const std::regex pair(R"(^\s*([^,\s]+)\s*[, ]\s*([^,\s]+)\s*$)");
  static const std::regex alg(R"(^\s*([+-]?[0-9.eE]+?(?:[eE][+-]?[0-9]+)?)\s*([+-])\s*([0-9.eE+-]*)\s*[ij]\s*$)");
  std::smatch m;
  double x, y;
  if (std::regex_match(s, m, pair)) {
    x = parse_decimal(m[1], "tau");
    y = parse_decimal(m[2], "tau");
  } else if (std::regex_match(s, m, alg)) {
    x = parse_decimal(m[1], "tau");
    const std::string ys = m[3].str().empty() ? "1" : m[3].str();
    y = parse_decimal(ys, "tau") * (m[2] == "-" ? -1 : 1);
  } else {
    throw InvalidArgument("tau: cannot parse '" + s + "' (use x+yi or x,y)");
  }
  if (!(y > 0)) throw InvalidArgument("tau: imaginary part must be positive");
  return {x, y};
}

int cmd_qexp(const RunConfig& c, std::ostream& out) {
  c.validate();
  require_series_weight(c);
  FourierSeries h0 = load_form(c);
  json report = config_json(c);
  FourierSeries h = scaled_form(c, h0, report);
  const auto idx = indices(c);
  report["normalization"] = "(2 pi i)^-k R_m";
  std::ostringstream csv;
  csv << "twist_index,m,re,im,error_bound,rational\n";
  json list = json::array();
  if (h.is_zero()) {
    report["tail_bound"] = "exact";
    for (i64 i : idx) {
      json coeffs = json::array();
      for (i64 m = 0; m <= c.terms; ++m) {
        Rational r = untwisted_normalized(c.level, c.weight, i, m);
        coeffs.push_back({{"m", m},
                          {"re", dec(r.to_double())},
                          {"im", "0"},
                          {"error_bound", "0"},
                          {"rational", r.str()}});
        csv << mod(i, c.level) << "," << m << "," << dec(r.to_double()) << ",0,0," << r.str() << "\n";
      }
      list.push_back({{"twist_index", mod(i, c.level)}, {"coefficients", coeffs}});
    }
  } else {
    report["tail_bound"] = bound_kind(h);
    auto tw = make_twist(h, c);
    FourierOptions opt;
    opt.threads = c.threads;
    auto qs = fourier_coeffs_multi(c.level, c.weight, idx, *tw, c.terms, c.budget, opt);
    for (const auto& q : qs) {
      json coeffs = json::array();
      for (i64 m = 0; m <= q.degree(); ++m) {
        json e = cplx_json(q.coeffs[m], q.errors[m]);
        e["m"] = m;
        e["rational"] = nullptr;
        coeffs.push_back(e);
        csv << q.twist_index << "," << m << "," << dec(q.coeffs[m].real()) << "," << dec(q.coeffs[m].imag()) << ","
            << dec(q.errors[m]) << ",\n";
      }
      list.push_back({{"twist_index", q.twist_index}, {"growth", dec(q.growth)}, {"coefficients", coeffs}});
    }
  }
  report["expansions"] = list;
  emit(c, out, report, csv.str());
  return kOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  c.validate();
  require_series_weight(c);
  if (!c.tau) throw InvalidArgument("eval: --tau is required");
  FourierSeries h0 = load_form(c);
  json report = config_json(c);
  FourierSeries h = scaled_form(c, h0, report);
  report["tail_bound"] = bound_kind(h);
  auto tw = make_twist(h, c);
  const HalfPlanePoint tau = HalfPlanePoint::from(*c.tau);
  std::ostringstream csv;
  csv << "twist_index,tau_re,tau_im,re,im,error_bound\n";
  json list = json::array();
  for (i64 i : indices(c)) {
    EisensteinSpec spec(c.level, c.weight, i, tw);
    Estimate e = eval_direct(spec, tau, c.budget);
    json v = cplx_json(e.value, e.error_bound);
    v["twist_index"] = spec.twist_index();
    list.push_back(v);
    csv << spec.twist_index() << "," << dec(tau.x) << "," << dec(tau.y) << "," << dec(e.value.real()) << ","
        << dec(e.value.imag()) << "," << dec(e.error_bound) << "\n";
  }
  report["values"] = list;
  emit(c, out, report, csv.str());
  return kOk;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  c.validate();
  require_series_weight(c);
  FourierSeries h0 = load_form(c);
  json report = config_json(c);
  FourierSeries h = scaled_form(c, h0, report);
  report["tail_bound"] = bound_kind(h);
  auto tw = make_twist(h, c);
  const i64 l = c.level;
  const int k = c.weight;
  const auto idx = indices(c);
  json checks = json::array();
  std::ostringstream csv;
  csv << "check,detail,residual,error_bound,threshold,pass\n";
  bool all = true;
  auto record = [&](const std::string& name, const std::string& detail, double res, double bound, double thr) {
    const bool pass = res < thr && std::isfinite(res);
    all = all && pass;
    checks.push_back({{"check", name},
                      {"detail", detail},
                      {"residual", dec(res)},
                      {"error_bound", dec(bound)},
                      {"threshold", dec(thr)},
                      {"pass", pass}});
    csv << name << "," << detail << "," << dec(res) << "," << dec(bound) << "," << dec(thr) << ","
        << (pass ? "true" : "false") << "\n";
  };

  if (h.is_zero()) {
    auto qs = fourier_coeffs_multi(l, k, idx, *tw, c.terms, c.budget.with_target(kOracleThreshold / 10));
    for (const auto& q : qs) {
      double res = 0, bound = 0;
      for (i64 m = 0; m <= q.degree(); ++m) {
        res = std::max(res, std::abs(q.coeffs[m] - untwisted_normalized(l, k, q.twist_index, m).to_double()));
        bound = std::max(bound, q.errors[m]);
      }
      record("oracle-equivalence", "i=" + std::to_string(q.twist_index), res, bound, kOracleThreshold);
    }
  }

  const HalfPlanePoint tau0{0.1, 1.2};
  for (i64 i : idx) {
    Residual r = dedekind_check(l, k, i, *tw, tau0, c.budget.with_target(kDedekindThreshold / 10));
    record("dedekind", "i=" + std::to_string(mod(i, l)) + " tau=0.1+1.2i", r.residual, r.error_bound,
           kDedekindThreshold);
  }

  // Generators with c != 0 are checked at tau = (-d +- e^{1.2 i}) / c, where |c tau + d| = 1.
  const auto gens = gamma0_generators(l);
  std::vector<GroupElement> picked;
  for (const auto& g : gens)
    if (g.c() != 0 && picked.size() < 3) picked.push_back(g);
  for (const auto& g : gens)
    if (g.c() == 0 && picked.size() < 4) picked.push_back(g);
  for (const auto& g : picked) {
    const cplx t = g.c() == 0 ? cplx(0.1, 1.2)
                              : (cplx(-static_cast<double>(g.d()), 0) + (g.c() > 0 ? 1.0 : -1.0) * std::polar(1.0, 1.2)) /
                                    static_cast<double>(g.c());
    for (i64 i : idx) {
      EisensteinSpec spec(l, k, i, tw);
      Residual r = modularity_residual(spec, g, HalfPlanePoint::from(t), c.budget.with_target(kModularityThreshold / 5));
      record("modularity", "i=" + std::to_string(spec.twist_index()) + " gamma=" + g.str(), r.residual,
             r.error_bound, kModularityThreshold);
    }
  }

  if (!h.is_zero()) {
    double worst = 0;
    std::string where = "none";
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = 0; b < gens.size(); ++b) {
        const double d = std::abs(twist_character(h, gens[a] * gens[b], c.budget) -
                                  twist_character(h, gens[a], c.budget) * twist_character(h, gens[b], c.budget));
        if (d >= worst) worst = d, where = gens[a].str() + "*" + gens[b].str();
      }
    // Each character value carries 2 pi times the H_cusp error, at most the budget target.
    record("character-homomorphism", where, worst, 6 * kPi * c.budget.target_abs_error, kCharacterThreshold);
  }

  if (h.has_real_coefficients()) {
    FourierOptions opt;
    opt.threads = c.threads;
    const i64 M = std::min<i64>(c.terms, 10);
    auto qs = fourier_coeffs_multi(l, k, idx, *tw, M, c.budget.with_target(kRealityThreshold / 10), opt);
    for (const auto& q : qs) {
      double res = 0, bound = 0;
      for (i64 m = 0; m <= M; ++m) {
        res = std::max(res, std::fabs(q.coeffs[m].imag()));
        bound = std::max(bound, q.errors[m]);
      }
      record("reality", "i=" + std::to_string(q.twist_index) + " m<=" + std::to_string(M), res, bound,
             kRealityThreshold);
    }
  }

  report["checks"] = checks;
  report["pass"] = all;
  emit(c, out, report, csv.str());
  return all ? kOk : kCheckFailed;
}

int cmd_periods(const RunConfig& c, std::ostream& out) {
  c.validate();
  FourierSeries h0 = load_form(c);
  json report = config_json(c);
  FourierSeries h = scaled_form(c, h0, report);
  report["tail_bound"] = bound_kind(h);
  TwistPoint p = TwistPoint::make(h, c.budget);
  std::ostringstream csv;
  csv << "generator,re_period,error_bound\n";
  json gens = json::array();
  for (std::size_t j = 0; j < p.periods.generators.size(); ++j) {
    const auto& g = p.periods.generators[j];
    gens.push_back({{"generator", {g.a(), g.b(), g.c(), g.d()}},
                    {"re_period", dec(p.periods.re_periods[j])},
                    {"error_bound", dec(p.periods.error_bounds[j])}});
    csv << "\"" << g.str() << "\"," << dec(p.periods.re_periods[j]) << "," << dec(p.periods.error_bounds[j]) << "\n";
  }
  report["re_periods"] = gens;
  auto ts = trivialization_scalars(p, c.max_height);
  json sc = json::array();
  for (double s : ts.scalars) sc.push_back(dec(s));
  report["trivialization"] = {{"kind", to_string(ts.kind)},
                              {"generator", dec(ts.generator)},
                              {"error_bound", dec(ts.generator_error)},
                              {"max_height", dec(c.max_height)},
                              {"scalars", sc}};
  emit(c, out, report, csv.str());
  return kOk;
}

int cmd_scan(const RunConfig& c, std::ostream& out) {
  c.validate();
  require_series_weight(c);
  FourierSeries h0 = load_form(c);
  json report = config_json(c);
  FourierSeries h = scaled_form(c, h0, report);
  report["tail_bound"] = bound_kind(h);
  report["max_den"] = c.max_den;
  report["tol"] = dec(c.tol);
  ScanReport s = rationality_scan(TwistPoint::make(h, c.budget), c.weight, c.terms, c.max_den, c.tol, c.budget,
                                  c.threads);
  std::ostringstream csv;
  csv << "i,j,m,kind,re,im,error_bound,rational,verdict\n";
  json entries = json::array();
  for (const auto& e : s.entries) {
    json v = {{"i", e.i},
              {"j", e.j},
              {"m", e.m},
              {"kind", e.series ? "series" : "coefficientwise"},
              {"verdict", e.verdict}};
    if (e.value) {
      v["re"] = dec(e.value->real());
      v["im"] = dec(e.value->imag());
    } else {
      v["re"] = v["im"] = nullptr;
    }
    v["error_bound"] = dec(e.error);
    v["rational"] = e.rational ? json(e.rational->str()) : json(nullptr);
    entries.push_back(v);
    csv << e.i << "," << e.j << "," << e.m << "," << (e.series ? "series" : "coefficientwise") << ","
        << (e.value ? dec(e.value->real()) : "") << "," << (e.value ? dec(e.value->imag()) : "") << ","
        << dec(e.error) << "," << (e.rational ? e.rational->str() : "") << "," << e.verdict << "\n";
  }
  report["zero_series"] = s.zero_series;
  report["summary"] = {{"series_total", s.series_total},
                       {"series_rational", s.series_rational},
                       {"coefficientwise_total", s.coefwise_total},
                       {"coefficientwise_rational", s.coefwise_rational},
                       {"max_height", s.max_height}};
  report["entries"] = entries;
  emit(c, out, report, csv.str());
  return kOk;
}

int cmd_form(const RunConfig& c, std::ostream& out) {
  c.validate();
  if (c.eta.empty()) throw InvalidArgument("form: --eta is required, e.g. 1:4,11:4");
  std::vector<std::pair<int, int>> factors;
  std::stringstream ss(c.eta);
  std::string item;
  int twice_weight = 0;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidArgument("form: eta factor '" + item + "' is not m:e");
    int m = 0, e = 0;
    try {
      m = std::stoi(item.substr(0, colon));
      e = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("form: eta factor '" + item + "' is not m:e");
    }
    if (m < 1 || c.level % m != 0) throw InvalidArgument("form: eta factor level " + std::to_string(m) + " does not divide --level");
    factors.emplace_back(m, e);
    twice_weight += e;
  }
  if (twice_weight <= 0 || twice_weight % 2) throw InvalidArgument("form: eta exponents must sum to a positive even number");
  i64 shift = 0;
  for (auto [m, e] : factors) shift += static_cast<i64>(m) * e;
  if (shift % 24) throw InvalidArgument("form: sum m e / 24 is not an integer");
  shift /= 24;
  if (shift > c.terms) throw InvalidArgument("form: --terms is below the order of vanishing");
  auto co = eta_quotient_coefficients(factors, c.terms - shift);
  std::vector<cplx> a(c.terms + 1, 0.0);
  for (i64 n = 0; n + shift <= c.terms; ++n) a[n + shift] = static_cast<double>(co[n]);
  FourierSeries f(c.level, twice_weight / 2, a);
  json j = series_to_json(f);
  j["eta"] = c.eta;
  if (c.fricke_sign != 0) {
    if (c.fricke_sign != 1 && c.fricke_sign != -1) throw InvalidArgument("form: --fricke-sign must be 1 or -1");
    j["fricke_sign"] = c.fricke_sign;
  }
  std::ostringstream csv;
  csv << "n,re,im,error_bound\n";
  for (i64 n = 0; n <= c.terms; ++n) csv << n << "," << dec(a[n].real()) << ",0,0\n";
  emit(c, out, j, csv.str());
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Twisted Eisenstein series toolkit"};
  app.require_subcommand(1);
  RunConfig c;
  std::string tau, target;
  auto common = [&](CLI::App* s, bool series) {
    s->add_option("--level", c.level, "level l")->capture_default_str();
    s->add_option("--form", c.form, "twisting form: zero, eta11, eta14, eta15 or a series file")->capture_default_str();
    s->add_option("--scale", c.form_scale, "multiply the twisting form by this real scalar")->capture_default_str();
    s->add_flag("--trivializing", c.trivializing_scale, "scale the form by the trivializing generator lambda*");
    s->add_option("--target-error", c.budget.target_abs_error, "target absolute error")->capture_default_str();
    s->add_option("--max-radius", c.budget.max_lattice_radius, "maximum lattice radius")->capture_default_str();
    s->add_option("--max-c", c.budget.max_c_terms, "maximum number of denominators")->capture_default_str();
    s->add_option("--max-q", c.budget.max_q_terms, "maximum number of q-terms")->capture_default_str();
    s->add_option("--out", c.out, "output path (default stdout)");
    s->add_option("--format", c.format, "json or csv")->capture_default_str();
    s->add_option("--threads", c.threads, "worker threads")->capture_default_str();
    if (series) {
      s->add_option("--weight", c.weight, "weight k >= 3")->capture_default_str();
      s->add_option("--twist-index", c.twist_indices, "twist indices i")->capture_default_str();
      s->add_flag("--all-indices", c.all_indices, "use every twist index 0..l-1");
      s->add_option("--terms", c.terms, "number of Fourier coefficients M")->capture_default_str();
    }
  };
  auto* qexp = app.add_subcommand("qexp", "normalized q-expansion (2 pi i)^-k R_m, m <= M");
  common(qexp, true);
  auto* eval = app.add_subcommand("eval", "direct lattice-sum value at tau");
  common(eval, true);
  eval->add_option("--tau", tau, "point x+yi or x,y")->required();
  auto* check = app.add_subcommand("check", "identity suite");
  common(check, true);
  auto* periods = app.add_subcommand("periods", "real periods on generators and trivializing scalars");
  common(periods, false);
  periods->add_option("--max-height", c.max_height, "largest trivializing scalar listed")->capture_default_str();
  auto* scan = app.add_subcommand("scan", "rationality scan of series quotients");
  common(scan, true);
  scan->add_option("--max-den", c.max_den, "largest reconstructed denominator")->capture_default_str();
  scan->add_option("--tol", c.tol, "reconstruction tolerance")->capture_default_str();
  scan->add_option("--max-height", c.max_height, "search bound for --trivializing")->capture_default_str();
  for (auto* s : {qexp, eval, check}) s->add_option("--max-height", c.max_height, "search bound for --trivializing");
  auto* form = app.add_subcommand("form", "exact eta quotient q-expansion as a series file");
  form->add_option("--level", c.level, "level")->capture_default_str();
  form->add_option("--eta", c.eta, "factors m:e, comma separated")->required();
  form->add_option("--terms", c.terms, "highest coefficient index")->capture_default_str();
  form->add_option("--fricke-sign", c.fricke_sign, "Fricke eigenvalue recorded in the file");
  form->add_option("--out", c.out, "output path (default stdout)");
  form->add_option("--format", c.format, "json or csv")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
  try {
    if (!tau.empty()) c.tau = parse_tau(tau);
    if (qexp->parsed()) return c.command = "qexp", cmd_qexp(c, out);
    if (eval->parsed()) return c.command = "eval", cmd_eval(c, out);
    if (check->parsed()) return c.command = "check", cmd_check(c, out);
    if (periods->parsed()) return c.command = "periods", cmd_periods(c, out);
    if (scan->parsed()) return c.command = "scan", cmd_scan(c, out);
    if (form->parsed()) return c.command = "form", cmd_form(c, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const PrecisionUnreachable& e) {
    err << "error: " << e.what() << " (achievable error " << dec(e.achievable_error()) << ")\n";
    return kPrecisionUnreachable;
  } catch (const NonconvergentIntegrand& e) {
    err << "error: " << e.what() << "\n";
    return kPrecisionUnreachable;
  } catch (const Inconclusive& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
  return kInvalidConfig;
}

}  // namespace teis::cli
