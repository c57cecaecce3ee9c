#include "ttofs/cli.hpp"

#include "ttofs/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace ttofs::cli {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(field.empty() ? key : field + "." + key, "unknown key");
  }
}

std::string join(const std::string& field, const std::string& key) { return field.empty() ? key : field + "." + key; }

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

double number_or(const json& obj, const std::string& field, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), join(field, key)) : fallback;
}

std::size_t count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(field, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::size_t positive_count(const json& j, const std::string& field) {
  const std::size_t n = count(j, field);
  if (n == 0) throw ConfigError(field, "must be ≥ 1");
  return n;
}

bool boolean(const json& j, const std::string& field) {
  if (!j.is_boolean()) throw ConfigError(field, "expected true or false");
  return j.get<bool>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

/// "2", "-0.5i", "1+2i", "i", "3e-2-i".
Complex complex_text(const std::string& s, const std::string& field) {
  const char* p = s.c_str();
  while (*p == ' ') ++p;
  auto bad = [&] { return ConfigError(field, "cannot read complex number '" + s + "'"); };
  auto imaginary_unit = [&](const char* q, double sign) -> std::optional<double> {
    if (*q == 'i') return sign;
    return std::nullopt;
  };
  auto rest_is_blank = [](const char* q) {
    while (*q == ' ') ++q;
    return *q == '\0';
  };

  double re = 0.0;
  double im = 0.0;
  if ((*p == '+' || *p == '-') && p[1] == 'i') {
    im = *p == '-' ? -1.0 : 1.0;
    if (!rest_is_blank(p + 2)) throw bad();
    return {0.0, im};
  }
  if (auto unit = imaginary_unit(p, 1.0)) {
    if (!rest_is_blank(p + 1)) throw bad();
    return {0.0, *unit};
  }
  char* end = nullptr;
  const double first = std::strtod(p, &end);
  if (end == p) throw bad();
  p = end;
  while (*p == ' ') ++p;
  if (*p == 'i') {
    if (!rest_is_blank(p + 1)) throw bad();
    return {0.0, first};
  }
  re = first;
  if (*p == '\0') return {re, 0.0};
  if (*p != '+' && *p != '-') throw bad();
  const double sign = *p == '-' ? -1.0 : 1.0;
  ++p;
  while (*p == ' ') ++p;
  if (*p == 'i') {
    im = sign;
    ++p;
  } else {
    const double second = std::strtod(p, &end);
    if (end == p) throw bad();
    p = end;
    if (*p != 'i') throw bad();
    ++p;
    im = sign * second;
  }
  if (!rest_is_blank(p)) throw bad();
  return {re, im};
}

Complex complex_value(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) return complex_text(j.get<std::string>(), field);
  throw ConfigError(field, "expected a number, [re, im] or \"re+imi\"");
}

Vector complex_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a nonempty list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_value(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

AngleRule angle_rule(const json& j, const std::string& field) {
  require_keys(j, field, {"offset", "period", "direction"});
  AngleRule a;
  a.offset = number_or(j, field, "offset", 0.0);
  if (j.contains("period")) a.period = static_cast<int>(count(j.at("period"), join(field, "period")));
  if (j.contains("direction")) {
    const double d = number(j.at("direction"), join(field, "direction"));
    if (d != 1.0 && d != -1.0) throw ConfigError(join(field, "direction"), "must be 1 or -1");
    a.direction = static_cast<int>(d);
  }
  return a;
}

GeometricRadius geometric_radius(const json& j, const std::string& field) {
  GeometricRadius g;
  g.ratio = number_or(j, field, "ratio", 0.5);
  if (!(g.ratio > 0.0 && g.ratio < 1.0)) throw ConfigError(join(field, "ratio"), "must lie in (0, 1)");
  if (j.contains("angles")) g.angles = angle_rule(j.at("angles"), join(field, "angles"));
  return g;
}

std::map<int, Complex> laurent_text(const std::string& body, const std::string& field) {
  std::string s = body;
  const auto open = s.find('{');
  const auto close = s.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ConfigError(field, "expected laurent:{k: c, ...}");
  s = s.substr(open + 1, close - open - 1);
  std::map<int, Complex> c;
  std::stringstream items(s);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.find_first_not_of(' ') == std::string::npos) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(field, "expected k: c in '" + item + "'");
    char* end = nullptr;
    const std::string key = item.substr(0, colon);
    const long k = std::strtol(key.c_str(), &end, 10);
    if (end == key.c_str() || key.find_first_not_of(" ", static_cast<std::size_t>(end - key.c_str())) != std::string::npos)
      throw ConfigError(field, "bad Fourier index '" + key + "'");
    c[static_cast<int>(k)] += complex_text(item.substr(colon + 1), field);
  }
  if (c.empty()) throw ConfigError(field, "empty coefficient map");
  return c;
}

std::map<int, Complex> coefficient_map(const json& j, const std::string& field) {
  std::map<int, Complex> c;
  for (const auto& [key, value] : j.items()) {
    char* end = nullptr;
    const long k = std::strtol(key.c_str(), &end, 10);
    if (key.empty() || *end != '\0') throw ConfigError(join(field, key), "Fourier index must be an integer");
    c[static_cast<int>(k)] += complex_value(value, join(field, key));
  }
  if (c.empty()) throw ConfigError(field, "empty coefficient map");
  return c;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(std::size_t n) { return std::to_string(n); }
std::string flag(bool b) { return b ? "1" : "0"; }

std::vector<std::size_t> n_list(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("n_list", "expected a nonempty list");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::size_t n = positive_count(j[i], "n_list[" + std::to_string(i) + "]");
    if (!out.empty() && n <= out.back()) throw ConfigError("n_list", "must be strictly increasing");
    out.push_back(n);
  }
  return out;
}

GridRect rect(const json& j) {
  require_keys(j, "rect", {"re", "im", "nx", "ny"});
  GridRect r;
  for (const char* axis : {"re", "im"}) {
    const std::string f = join("rect", axis);
    if (!j.contains(axis)) throw ConfigError(f, "missing");
    const json& span = j.at(axis);
    if (!span.is_array() || span.size() != 2) throw ConfigError(f, "expected [min, max]");
    const double lo = number(span[0], f);
    const double hi = number(span[1], f);
    if (!(lo < hi)) throw ConfigError(f, "min must be below max");
    (axis[0] == 'r' ? r.re_min : r.im_min) = lo;
    (axis[0] == 'r' ? r.re_max : r.im_max) = hi;
  }
  if (j.contains("nx")) r.nx = count(j.at("nx"), "rect.nx");
  if (j.contains("ny")) r.ny = count(j.at("ny"), "rect.ny");
  if (r.nx < 2 || r.ny < 2) throw ConfigError("rect", "nx and ny must be ≥ 2");
  return r;
}

ExperimentKind kind(const json& j) {
  const std::string k = text(j, "kind");
  for (auto e : {ExperimentKind::Widom, ExperimentKind::Isometry, ExperimentKind::Stability, ExperimentKind::Convergence,
                 ExperimentKind::Fredholm, ExperimentKind::Pseudospectra}) {
    if (to_string(e) == k) return e;
  }
  throw ConfigError("kind", "unknown experiment '" + k + "'");
}

CompactTerm compact_term(const json& j, const std::string& field, std::optional<std::size_t> grid_m) {
  require_keys(j, field, {"coefficient", "left", "right", "left_symbol"});
  if (!j.contains("left") || !j.contains("right")) throw ConfigError(field, "needs left and right");
  CompactTerm t;
  if (j.contains("coefficient")) t.coefficient = complex_value(j.at("coefficient"), join(field, "coefficient"));
  t.left = complex_vector(j.at("left"), join(field, "left"));
  t.right = complex_vector(j.at("right"), join(field, "right"));
  if (j.contains("left_symbol")) t.left_symbol = parse_symbol(j.at("left_symbol"), join(field, "left_symbol"), grid_m);
  return t;
}

Perturbation perturbation(const json& j, std::uint64_t seed) {
  require_keys(j, "perturbation", {"rule", "scale", "rate"});
  Perturbation p;
  p.seed = seed;
  const std::string rule = j.contains("rule") ? text(j.at("rule"), "perturbation.rule") : "none";
  if (rule == "none") p.rule = DecayRule::None;
  else if (rule == "geometric") p.rule = DecayRule::Geometric;
  else if (rule == "harmonic") p.rule = DecayRule::Harmonic;
  else throw ConfigError("perturbation.rule", "expected none, geometric or harmonic");
  p.scale = number_or(j, "perturbation", "scale", 0.0);
  p.rate = number_or(j, "perturbation", "rate", 0.5);
  if (p.scale < 0.0) throw ConfigError("perturbation.scale", "must be ≥ 0");
  if (p.rule == DecayRule::Geometric && !(p.rate > 0.0 && p.rate < 1.0))
    throw ConfigError("perturbation.rate", "must lie in (0, 1)");
  return p;
}

SequenceSpec sequence(const ExperimentConfig& c) { return SequenceSpec{c.u, c.a, c.compact, c.perturbation}; }

json error_record(const std::string& kind, const std::string& message, const std::string& field = "") {
  json e{{"error", kind}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  return e;
}

unsigned thread_count(bool parallel) {
  if (!parallel) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Assertions {
  json list = json::array();
  bool ok = true;

  void add(const std::string& name, bool passed, const std::string& detail) {
    list.push_back({{"name", name}, {"passed", passed}, {"detail", detail}});
    ok = ok && passed;
  }
};

std::size_t symbol_grid(const Symbol& s) { return s.grid().size(); }
bool symbol_truncated(const Symbol& s) { return !s.is_trig_polynomial(); }

RunResult widom(const ExperimentConfig& c, Assertions& checks) {
  RunResult r;
  Table t{"residuals", {"n", "N_F", "M", "residual_spectral", "residual_frobenius", "truncation_flag"}, {}};
  const double bound = c.expect.max_residual.value_or(1e-8);
  double worst = 0.0;
  json rows = json::array();
  for (std::size_t n : c.n_list) {
    const WidomReport w = tto_widom_residual(c.u, c.a, c.b, n, c.window);
    t.rows.push_back({fmt(n), fmt(w.window), fmt(w.grid_size), fmt(w.residual_spectral), fmt(w.residual_frobenius),
                      flag(w.truncation_flag)});
    rows.push_back({{"n", n}, {"residual_spectral", w.residual_spectral}, {"truncation_flag", w.truncation_flag}});
    worst = std::max(worst, w.residual_spectral);
  }
  checks.add("residual_spectral <= " + fmt(bound), worst <= bound, "max residual " + fmt(worst));
  r.document["results"] = {{"residuals", rows}, {"max_residual", worst}};
  r.tables.push_back(std::move(t));
  return r;
}

RunResult isometry(const ExperimentConfig& c, Assertions& checks) {
  RunResult r;
  Table t{"residuals", {"n", "N_F", "M", "range_residual", "initial_residual", "truncation_flag"}, {}};
  const double bound = c.expect.max_residual.value_or(1e-8);
  double worst = 0.0;
  json rows = json::array();
  for (std::size_t n : c.n_list) {
    const auto zeros = c.u.zeros(n);
    const Symbol v = blaschke_symbol(zeros, c.window);
    const IsometryResiduals res = hankel_isometry_check(v, c.window);
    t.rows.push_back({fmt(n), fmt(c.window), fmt(symbol_grid(v)), fmt(res.range), fmt(res.initial), flag(res.tail_warning)});
    rows.push_back({{"n", n}, {"range", res.range}, {"initial", res.initial}, {"truncation_flag", res.tail_warning}});
    worst = std::max({worst, res.range, res.initial});
  }
  checks.add("isometry residual <= " + fmt(bound), worst <= bound, "max residual " + fmt(worst));
  r.document["results"] = {{"residuals", rows}, {"max_residual", worst}};
  r.tables.push_back(std::move(t));
  return r;
}

RunResult stability(const ExperimentConfig& c, Assertions& checks) {
  RunResult r;
  const StabilityReport rep = stability_probe(sequence(c), c.n_list, c.threshold);
  Table t{"sigma_min", {"n", "N_F", "M", "sigma_min", "truncation_flag"}, {}};
  for (std::size_t i = 0; i < c.n_list.size(); ++i)
    t.rows.push_back({fmt(c.n_list[i]), "0", fmt(symbol_grid(c.a)), fmt(rep.sigma_min_trace[i]), flag(symbol_truncated(c.a))});
  const std::string verdict = to_string(rep.verdict);
  checks.add("certificate consistent", rep.certificate_consistent,
             rep.certificate ? "certificate " + fmt(*rep.certificate) : "no certificate");
  if (c.expect.verdict) checks.add("verdict == " + *c.expect.verdict, verdict == *c.expect.verdict, "verdict " + verdict);
  r.document["results"] = {{"verdict", verdict},
                           {"sigma_min", rep.sigma_min_trace},
                           {"threshold", c.threshold},
                           {"certificate", rep.certificate ? json(*rep.certificate) : json(nullptr)},
                           {"certificate_consistent", rep.certificate_consistent}};
  r.tables.push_back(std::move(t));
  return r;
}

std::size_t default_reference(const ExperimentConfig& c) {
  std::size_t ref = c.reference_n.value_or(2 * c.n_list.back());
  if (const auto size = c.u.size()) ref = std::min(ref, *size);
  return ref;
}

json rect_json(const GridRect& g) {
  return {{"re", {g.re_min, g.re_max}}, {"im", {g.im_min, g.im_max}}, {"nx", g.nx}, {"ny", g.ny}};
}

RunResult convergence(const ExperimentConfig& c, Assertions& checks) {
  RunResult r;
  const std::size_t ref = default_reference(c);
  const ConvergenceReport rep = convergence_report(sequence(c), c.n_list, ref, c.eps_list, c.rect, thread_count(c.parallel));
  Table t{"distances", {"track", "eps", "n", "reference_n", "N_F", "M", "distance", "truncation_flag"}, {}};
  json tracks = json::array();
  bool monotone = true;
  for (const auto& track : rep.tracks) {
    for (std::size_t i = 0; i < rep.n_list.size(); ++i)
      t.rows.push_back({track.track, fmt(track.eps), fmt(rep.n_list[i]), fmt(ref), "0", fmt(symbol_grid(c.a)),
                        fmt(track.distances[i]), flag(symbol_truncated(c.a))});
    tracks.push_back({{"track", track.track}, {"eps", track.eps}, {"distances", track.distances}, {"nonincreasing", track.nonincreasing}});
    monotone = monotone && track.nonincreasing;
  }
  if (c.expect.nonincreasing) checks.add("Hausdorff distances nonincreasing (10% slack)", monotone, std::to_string(rep.tracks.size()) + " tracks");
  r.document["results"] = {{"reference_n", ref}, {"rect", rect_json(rep.rect)}, {"tracks", tracks},
                           {"eigen_track_skipped", rep.eigen_track_skipped}};
  r.tables.push_back(std::move(t));
  return r;
}

RunResult fredholm(const ExperimentConfig& c, Assertions& checks) {
  RunResult r;
  const FredholmReport rep = fredholm_kernel_estimate(sequence(c), c.n_list, c.gap_factor, c.tolerance);
  Table t{"singular_values", {"n", "index", "N_F", "M", "sigma", "truncation_flag"}, {}};
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    const RealVector& s = rep.singular_values[i];
    for (Eigen::Index k = 0; k < s.size(); ++k)
      t.rows.push_back({fmt(c.n_list[i]), fmt(static_cast<std::size_t>(k + 1)), "0", fmt(symbol_grid(c.a)), fmt(s[k]),
                        flag(symbol_truncated(c.a))});
  }
  if (c.expect.kernel_dim) {
    const bool ok = rep.k && *rep.k == *c.expect.kernel_dim;
    checks.add("kernel dimension == " + fmt(*c.expect.kernel_dim), ok, rep.k ? "detected " + fmt(*rep.k) : "no stable gap");
  }
  r.document["results"] = {{"kernel_dim", rep.k ? json(*rep.k) : json(nullptr)}, {"tolerance", rep.tolerance},
                           {"gap_factor", c.gap_factor}};
  r.tables.push_back(std::move(t));
  return r;
}

RunResult pseudospectra(const ExperimentConfig& c, Assertions& checks, bool& coverage) {
  RunResult r;
  const SequenceSpec spec = sequence(c);
  const double eps_max = *std::max_element(c.eps_list.begin(), c.eps_list.end());
  std::vector<Matrix> sections;
  for (std::size_t n : c.n_list) sections.push_back(build_section(spec, n));
  const GridRect g = c.rect.value_or(GridRect::square(spectral_norm(sections.back()) + 2.0 * eps_max, 101));
  Table summary{"summary", {"n", "eps", "N_F", "M", "points", "coverage_warning", "full_grid", "truncation_flag"}, {}};
  Table points{"points", {"n", "eps", "re", "im"}, {}};
  json rows = json::array();
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    for (double eps : c.eps_list) {
      const PseudospectrumSet set = pseudospectrum_grid(sections[i], eps, g, thread_count(c.parallel));
      summary.rows.push_back({fmt(c.n_list[i]), fmt(eps), "0", fmt(symbol_grid(c.a)), fmt(set.set.points.size()),
                              flag(set.coverage_warning), flag(set.full_grid), flag(symbol_truncated(c.a))});
      for (const Complex& p : set.set.points) points.rows.push_back({fmt(c.n_list[i]), fmt(eps), fmt(p.real()), fmt(p.imag())});
      rows.push_back({{"n", c.n_list[i]}, {"eps", eps}, {"points", set.set.points.size()}, {"coverage_warning", set.coverage_warning}});
      coverage = coverage || set.coverage_warning;
    }
  }
  checks.add("pseudospectra inside the grid", !coverage, coverage ? "a set touches the grid boundary" : "covered");
  r.document["results"] = {{"rect", rect_json(g)}, {"sets", rows}};
  r.tables.push_back(std::move(summary));
  r.tables.push_back(std::move(points));
  return r;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", e.what());
  }
}

std::filesystem::path output_dir(const OutputSpec& output) {
  if (const char* env = std::getenv(kOutputDirVariable); env != nullptr && *env != '\0') return env;
  return output.dir;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Widom: return "widom";
    case ExperimentKind::Isometry: return "isometry";
    case ExperimentKind::Stability: return "stability";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::Fredholm: return "fredholm";
    case ExperimentKind::Pseudospectra: return "pseudospectra";
  }
  return "widom";
}

BlaschkeProduct parse_zeros(const json& j) {
  const std::string field = "zeros";
  try {
    if (j.is_array()) {
      std::vector<Complex> z;
      const Vector v = complex_vector(j, field);
      for (Eigen::Index i = 0; i < v.size(); ++i) z.push_back(v[i]);
      return BlaschkeProduct::from_zeros(z);
    }
    if (!j.is_object() || !j.contains("family")) throw ConfigError(field, "expected a list of zeros or {\"family\": ...}");
    const std::string family = text(j.at("family"), "zeros.family");
    if (family == "geometric-radius") {
      require_keys(j, field, {"family", "ratio", "angles"});
      return BlaschkeProduct(geometric_radius(j, field));
    }
    if (family == "harmonic-radius") {
      require_keys(j, field, {"family", "scale", "angles"});
      HarmonicRadius h;
      h.scale = number_or(j, field, "scale", 1.0);
      if (!(h.scale > 0.0 && h.scale < 2.0)) throw ConfigError("zeros.scale", "must lie in (0, 2)");
      if (j.contains("angles")) h.angles = angle_rule(j.at("angles"), "zeros.angles");
      return BlaschkeProduct(h);
    }
    if (family == "all-zero-prefix") {
      require_keys(j, field, {"family", "prefix", "tail"});
      AllZeroPrefix a;
      if (j.contains("prefix")) a.prefix = count(j.at("prefix"), "zeros.prefix");
      if (j.contains("tail")) {
        require_keys(j.at("tail"), "zeros.tail", {"ratio", "angles"});
        a.tail = geometric_radius(j.at("tail"), "zeros.tail");
      }
      if (a.prefix == 0 && !a.tail) throw ConfigError(field, "all-zero-prefix needs prefix ≥ 1 or a tail");
      return BlaschkeProduct(a);
    }
    if (family == "explicit") {
      require_keys(j, field, {"family", "zeros"});
      if (!j.contains("zeros")) throw ConfigError("zeros.zeros", "missing");
      return parse_zeros(j.at("zeros"));
    }
    throw ConfigError("zeros.family", "unknown family '" + family + "'");
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

Symbol parse_symbol(const json& j, const std::string& field, std::optional<std::size_t> grid_m) {
  std::map<int, Complex> c;
  std::string tag;
  if (j.is_number() || j.is_array()) {
    c[0] = complex_value(j, field);
    tag = "constant";
  } else if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "shift") {
      c[1] = 1.0;
      tag = "shift";
    } else if (s.rfind("laurent:", 0) == 0) {
      c = laurent_text(s.substr(8), field);
      tag = s;
    } else {
      c[0] = complex_text(s, field);
      tag = "constant";
    }
  } else if (j.is_object()) {
    c = coefficient_map(j, field);
    tag = "laurent";
  } else {
    throw ConfigError(field, "expected a number, \"shift\", \"laurent:{...}\" or a coefficient map");
  }
  Symbol s(c);
  if (grid_m) {
    if (*grid_m <= 2 * static_cast<std::size_t>(s.window()))
      throw ConfigError("grid_M", "must exceed twice the symbol degree (" + std::to_string(2 * s.window()) + ")");
    const CircleGrid grid(*grid_m);
    s = Symbol(s.coefficients(), grid, s.evaluate(grid), 0.0, {});
  }
  s.set_tag(tag);
  return s;
}

ExperimentConfig parse_config(const json& j) {
  require_keys(j, "", {"description", "kind", "zeros", "symbol", "symbol_b", "n_list", "N_F", "grid_M", "eps_list", "seed",
                       "reference_n", "compact", "perturbation", "threshold", "gap_factor", "tolerance", "rect", "expect",
                       "output", "parallel"});
  ExperimentConfig c;
  if (!j.contains("kind")) throw ConfigError("kind", "missing");
  c.kind = kind(j.at("kind"));
  if (!j.contains("zeros")) throw ConfigError("zeros", "missing");
  c.u = parse_zeros(j.at("zeros"));
  if (!j.contains("n_list")) throw ConfigError("n_list", "missing");
  c.n_list = n_list(j.at("n_list"));
  if (const auto size = c.u.size(); size && c.n_list.back() > *size)
    throw ConfigError("n_list", "n = " + std::to_string(c.n_list.back()) + " exceeds the " + std::to_string(*size) + " zeros");

  std::optional<std::size_t> grid_m;
  if (j.contains("grid_M")) grid_m = positive_count(j.at("grid_M"), "grid_M");
  if (c.kind != ExperimentKind::Isometry) {
    if (!j.contains("symbol")) throw ConfigError("symbol", "missing");
    c.a = parse_symbol(j.at("symbol"), "symbol", grid_m);
    c.b = j.contains("symbol_b") ? parse_symbol(j.at("symbol_b"), "symbol_b", grid_m) : c.a;
  }
  if (j.contains("N_F")) c.window = positive_count(j.at("N_F"), "N_F");
  if (j.contains("eps_list")) {
    const json& e = j.at("eps_list");
    if (!e.is_array() || e.empty()) throw ConfigError("eps_list", "expected a nonempty list");
    c.eps_list.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double eps = number(e[i], "eps_list[" + std::to_string(i) + "]");
      if (!(eps > 0.0)) throw ConfigError("eps_list", "entries must be positive");
      c.eps_list.push_back(eps);
    }
  }
  if (j.contains("seed")) c.seed = count(j.at("seed"), "seed");
  if (j.contains("compact")) {
    const json& k = j.at("compact");
    if (!k.is_array()) throw ConfigError("compact", "expected a list of terms");
    for (std::size_t i = 0; i < k.size(); ++i) c.compact.push_back(compact_term(k[i], "compact[" + std::to_string(i) + "]", grid_m));
  }
  if (j.contains("perturbation")) c.perturbation = perturbation(j.at("perturbation"), c.seed);
  c.threshold = number_or(j, "", "threshold", c.threshold);
  c.gap_factor = number_or(j, "", "gap_factor", c.gap_factor);
  c.tolerance = number_or(j, "", "tolerance", c.tolerance);
  if (!(c.threshold > 0.0)) throw ConfigError("threshold", "must be positive");
  if (!(c.gap_factor > 0.0 && c.gap_factor <= 1.0)) throw ConfigError("gap_factor", "must lie in (0, 1]");
  if (!(c.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (j.contains("reference_n")) {
    c.reference_n = positive_count(j.at("reference_n"), "reference_n");
    if (*c.reference_n < c.n_list.back()) throw ConfigError("reference_n", "must be ≥ the largest n");
    if (const auto size = c.u.size(); size && *c.reference_n > *size) throw ConfigError("reference_n", "exceeds the number of zeros");
  }
  if (j.contains("rect")) c.rect = rect(j.at("rect"));
  if (j.contains("expect")) {
    const json& e = j.at("expect");
    require_keys(e, "expect", {"max_residual", "verdict", "kernel_dim", "nonincreasing"});
    if (e.contains("max_residual")) c.expect.max_residual = number(e.at("max_residual"), "expect.max_residual");
    if (e.contains("verdict")) {
      const std::string v = text(e.at("verdict"), "expect.verdict");
      if (v != "stable" && v != "unstable" && v != "inconclusive") throw ConfigError("expect.verdict", "unknown verdict '" + v + "'");
      c.expect.verdict = v;
    }
    if (e.contains("kernel_dim")) c.expect.kernel_dim = count(e.at("kernel_dim"), "expect.kernel_dim");
    if (e.contains("nonincreasing")) c.expect.nonincreasing = boolean(e.at("nonincreasing"), "expect.nonincreasing");
  }
  c.output.prefix = to_string(c.kind);
  if (j.contains("output")) {
    const json& o = j.at("output");
    require_keys(o, "output", {"dir", "prefix"});
    if (o.contains("dir")) c.output.dir = text(o.at("dir"), "output.dir");
    if (o.contains("prefix")) c.output.prefix = text(o.at("prefix"), "output.prefix");
    if (c.output.prefix.empty() || c.output.prefix.find('/') != std::string::npos)
      throw ConfigError("output.prefix", "must be a nonempty file name prefix");
  }
  if (j.contains("parallel")) c.parallel = boolean(j.at("parallel"), "parallel");
  if (c.kind == ExperimentKind::Stability && c.n_list.size() < 3) throw ConfigError("n_list", "stability needs at least 3 sizes");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

std::string to_csv(const Table& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

RunResult run(const ExperimentConfig& c) {
  Assertions checks;
  bool coverage = false;
  RunResult r;
  switch (c.kind) {
    case ExperimentKind::Widom: r = widom(c, checks); break;
    case ExperimentKind::Isometry: r = isometry(c, checks); break;
    case ExperimentKind::Stability: r = stability(c, checks); break;
    case ExperimentKind::Convergence: r = convergence(c, checks); break;
    case ExperimentKind::Fredholm: r = fredholm(c, checks); break;
    case ExperimentKind::Pseudospectra: r = pseudospectra(c, checks, coverage); break;
  }
  const BlaschkeCheck bc = check_blaschke_condition(c.u, c.n_list.back());
  r.status = coverage ? kExitResolution : (checks.ok ? kExitPass : kExitAssertion);
  r.document["kind"] = to_string(c.kind);
  r.document["zeros"] = {{"family", c.u.family_name()}, {"blaschke_partial_sum", bc.partial_sum},
                         {"blaschke_verdict", to_string(bc.verdict)}};
  if (c.kind != ExperimentKind::Isometry) r.document["symbols"] = {c.a.tag(), c.b.tag()};
  r.document["parameters"] = {{"n_list", c.n_list}, {"N_F", c.window}, {"seed", c.seed}, {"eps_list", c.eps_list}};
  r.document["assertions"] = checks.list;
  r.document["status"] = r.status;
  if (coverage) r.document["error"] = error_record("coverage", "a pseudospectrum touches the grid boundary; enlarge rect");
  json files = json::array();
  for (const auto& t : r.tables) files.push_back(t.name);
  r.document["tables"] = files;
  return r;
}

std::filesystem::path write_artifacts(const RunResult& result, const OutputSpec& output) {
  const std::filesystem::path dir = output_dir(output);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir", "cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    f << body;
    if (!f) throw ConfigError("output.dir", "cannot write " + (dir / name).string());
  };
  write(output.prefix + "_result.json", result.document.dump(2) + "\n");
  for (const auto& t : result.tables) write(output.prefix + "_" + t.name + ".csv", to_csv(t));
  return dir;
}

json catalog() {
  const json stable_symbol = "laurent:{-1: 0.5, 0: 2, 1: 0.5}";
  json families = json::array();
  auto family = [&](const std::string& name, json params, const std::string& zeros, json example) {
    const BlaschkeProduct u = parse_zeros(example.at("zeros"));
    const std::size_t n = u.size().value_or(64);
    families.push_back({{"name", name}, {"parameters", params}, {"zeros", zeros},
                        {"blaschke_verdict", to_string(check_blaschke_condition(u, n).verdict)}, {"example", example}});
  };
  const json angles = "optional {offset, period, direction}: angle offset + 2π·direction·k/period (period 0: constant)";
  family("geometric-radius", {{"ratio", "in (0, 1); 1 − |λ_k| = ratio^k"}, {"angles", angles}}, "λ_k = (1 − ratio^k)·e^{iθ_k}",
         {{"kind", "stability"},
          {"zeros", {{"family", "geometric-radius"}, {"ratio", 0.5}}},
          {"symbol", stable_symbol},
          {"n_list", {4, 8, 16}},
          {"expect", {{"verdict", "stable"}}}});
  family("harmonic-radius", {{"scale", "in (0, 2); 1 − |λ_k| = scale/(k+1)"}, {"angles", angles}},
         "λ_k = (1 − scale/(k+1))·e^{iθ_k}; the Blaschke sum diverges",
         {{"kind", "stability"},
          {"zeros", {{"family", "harmonic-radius"}, {"scale", 1.0}}},
          {"symbol", stable_symbol},
          {"n_list", {4, 8, 16}}});
  family("all-zero-prefix", {{"prefix", "number of zeros at the origin"}, {"tail", "optional geometric-radius parameters {ratio, angles}"}},
         "λ_1 = ... = λ_prefix = 0, then the geometric tail",
         {{"kind", "stability"},
          {"zeros", {{"family", "all-zero-prefix"}, {"prefix", 1}, {"tail", {{"ratio", 0.5}}}}},
          {"symbol", "shift"},
          {"n_list", {4, 8, 16}},
          {"expect", {{"verdict", "unstable"}}}});
  family("explicit", {{"zeros", "list of complex numbers (number, [re, im] or \"re+imi\"), |λ| < 1 − 1e−12"}},
         "finite list, reordered by modulus then argument",
         {{"kind", "widom"},
          {"zeros", {{"family", "explicit"}, {"zeros", {0.3, "0.5i", -0.7}}}},
          {"symbol", "shift"},
          {"symbol_b", "laurent:{-1: 1}"},
          {"n_list", {1, 2, 3}},
          {"N_F", 256}});
  json symbols = json::array({
      {{"form", "shift"}, {"meaning", "a(t) = t"}},
      {{"form", "laurent:{k: c, ...}"}, {"meaning", "Σ c·t^k; c is a real or \"re+imi\" number"}},
      {{"form", "{\"k\": c, ...}"}, {"meaning", "Fourier coefficient map; c is a number, [re, im] or \"re+imi\""}},
      {{"form", "c"}, {"meaning", "constant symbol"}},
  });
  json kinds = json::array();
  for (auto k : {ExperimentKind::Widom, ExperimentKind::Isometry, ExperimentKind::Stability, ExperimentKind::Convergence,
                 ExperimentKind::Fredholm, ExperimentKind::Pseudospectra})
    kinds.push_back(to_string(k));
  return {{"families", families}, {"symbols", symbols}, {"experiments", kinds}};
}

namespace {

int report_error(std::ostream& err, int code, const json& record, const std::optional<OutputSpec>& output) {
  err << record.dump() << "\n";
  if (output) {
    std::error_code ec;
    const std::filesystem::path dir = output_dir(*output);
    std::filesystem::create_directories(dir, ec);
    if (!ec) std::ofstream(dir / (output->prefix + "_error.json")) << record.dump(2) << "\n";
  }
  return code;
}

}  // namespace

int command_run(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  std::optional<OutputSpec> output;
  try {
    const ExperimentConfig c = load_config(config);
    output = c.output;
    const RunResult r = run(c);
    const auto dir = write_artifacts(r, c.output);
    out << to_string(c.kind) << ": " << (r.status == kExitPass ? "pass" : "fail") << " (" << dir.string() << ")\n";
    if (r.document.contains("error")) err << r.document.at("error").dump() << "\n";
    return r.status;
  } catch (const ConfigError& e) {
    return report_error(err, kExitConfig, error_record("config", e.what(), e.field()), output);
  } catch (const ResolutionError& e) {
    return report_error(err, kExitResolution, error_record("resolution", e.what()), output);
  } catch (const Error& e) {
    return report_error(err, kExitConfig, error_record("domain", e.what()), output);
  }
}

int command_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig c = load_config(config);
    out << json{{"valid", true}, {"kind", to_string(c.kind)}}.dump() << "\n";
    return kExitPass;
  } catch (const ConfigError& e) {
    return report_error(err, kExitConfig, error_record("config", e.what(), e.field()), std::nullopt);
  }
}

int command_list_families(std::ostream& out) {
  out << catalog().dump(2) << "\n";
  return kExitPass;
}

}  // namespace ttofs::cli
