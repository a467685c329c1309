#include "multibang/config.hpp"

#include "multibang/csv.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace multibang {

ConfigError::ConfigError(int line, const std::string &what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_plain(const std::string &s) {
  double v = 0.0;
  const char *first = s.data(), *last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::uint64_t parse_u64(const std::string &s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not a non-negative integer: '" + s + "'");
  return v;
}

int parse_int(const std::string &s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string &s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<double> parse_list(const std::string &s) {
  std::vector<double> out;
  for (const auto &t : split(s, ',')) out.push_back(parse_real(t));
  return out;
}

std::string join(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_real(v[i]);
  return out;
}

using Setter = std::function<void(ExperimentConfig &, const std::string &)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = {
      {"model", [](auto &c, const auto &v) { c.model = v; }},
      {"penalty", [](auto &c, const auto &v) { c.penalty = v; }},
      {"alpha", [](auto &c, const auto &v) { c.alpha = parse_real(v); }},
      {"seed", [](auto &c, const auto &v) { c.seed = parse_u64(v); }},
      {"omega0", [](auto &c, const auto &v) { c.omega0 = parse_real(v); }},
      {"phases", [](auto &c, const auto &v) { c.phases = parse_list(v); }},
      {"omegas", [](auto &c, const auto &v) { c.omegas = parse_list(v); }},
      {"final_time", [](auto &c, const auto &v) { c.final_time = parse_real(v); }},
      {"n_intervals", [](auto &c, const auto &v) { c.n_intervals = parse_int(v); }},
      {"gyro", [](auto &c, const auto &v) { c.gyro = parse_real(v); }},
      {"field", [](auto &c, const auto &v) { c.field = parse_real(v); }},
      {"bloch_target", [](auto &c, const auto &v) { c.bloch_target = v; }},
      {"target_index", [](auto &c, const auto &v) { c.target_index = parse_int(v); }},
      {"nx", [](auto &c, const auto &v) { c.nx = parse_int(v); }},
      {"ny", [](auto &c, const auto &v) { c.ny = parse_int(v); }},
      {"youngs", [](auto &c, const auto &v) { c.youngs = parse_real(v); }},
      {"poisson", [](auto &c, const auto &v) { c.poisson = parse_real(v); }},
      {"elastic_target", [](auto &c, const auto &v) { c.elastic_target = v; }},
      {"rotation_angle", [](auto &c, const auto &v) { c.rotation_angle = parse_real(v); }},
      {"deadload_magnitude", [](auto &c, const auto &v) { c.deadload_magnitude = parse_real(v); }},
      {"deadload_noise", [](auto &c, const auto &v) { c.deadload_noise = parse_real(v); }},
      {"lumped_control_mass", [](auto &c, const auto &v) { c.lumped_control_mass = parse_bool(v); }},
      {"gamma0", [](auto &c, const auto &v) { c.gamma0 = parse_real(v); }},
      {"gamma_factor", [](auto &c, const auto &v) { c.gamma_factor = parse_real(v); }},
      {"gamma_min", [](auto &c, const auto &v) { c.gamma_min = parse_real(v); }},
      {"tol_abs", [](auto &c, const auto &v) { c.tol_abs = parse_real(v); }},
      {"tol_rel", [](auto &c, const auto &v) { c.tol_rel = parse_real(v); }},
      {"max_iter", [](auto &c, const auto &v) { c.max_iter = parse_int(v); }},
      {"krylov_tol", [](auto &c, const auto &v) { c.krylov_tol = parse_real(v); }},
      {"krylov_max", [](auto &c, const auto &v) { c.krylov_max = parse_int(v); }},
      {"ls_factor", [](auto &c, const auto &v) { c.ls_factor = parse_real(v); }},
      {"ls_max_halvings", [](auto &c, const auto &v) { c.ls_max_halvings = parse_int(v); }},
      {"output_dir", [](auto &c, const auto &v) { c.output_dir = v; }},
  };
  return table;
}

void check(bool ok, int line, const std::string &what) {
  if (!ok) throw ConfigError(line, what);
}

} // namespace

double parse_real(const std::string &token) {
  std::string s;
  for (char ch : token)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_plain(s);
  // [sign][coef[*]]pi[/den]
  std::string head = s.substr(0, pos), tail = s.substr(pos + 2);
  double sign = 1.0;
  if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
    sign = head[0] == '-' ? -1.0 : 1.0;
    head.erase(0, 1);
  }
  if (!head.empty() && head.back() == '*') head.pop_back();
  const double coef = head.empty() ? 1.0 : parse_plain(head);
  double den = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') throw std::invalid_argument("malformed pi expression: '" + token + "'");
    den = parse_plain(tail.substr(1));
  }
  return sign * coef * std::numbers::pi / den;
}

int ExperimentConfig::newton_max_iter() const {
  if (max_iter > 0) return max_iter;
  return model == "bloch" ? 500 : 50;
}

ExperimentConfig parse_config(const std::string &text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    check(eq != std::string::npos, line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    const auto it = setters().find(key);
    check(it != setters().end(), line, "unknown key '" + key + "'");
    check(seen.insert(key).second, line, "duplicate key '" + key + "'");
    check(!value.empty(), line, "empty value for '" + key + "'");
    try {
      it->second(c, value);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(line, key + ": " + e.what());
    }
  }

  for (const char *k : {"model", "penalty", "alpha", "seed"})
    check(seen.count(k) > 0, 0, std::string("missing required key '") + k + "'");
  check(c.model == "bloch" || c.model == "elasticity", 0, "model must be bloch or elasticity");
  check(c.penalty == "radial" || c.penalty == "concentric", 0,
        "penalty must be radial or concentric");
  check(!(c.penalty == "concentric" && c.model == "bloch"), 0,
        "the concentric penalty is only available for elasticity");
  check(c.alpha > 0.0, 0, "alpha must be positive");
  if (c.penalty == "radial") {
    check(seen.count("phases") > 0, 0, "radial penalty requires 'phases'");
    check(c.omega0 > 0.0, 0, "omega0 must be positive");
  }
  if (c.model == "bloch") {
    check(!c.omegas.empty(), 0, "bloch model requires 'omegas'");
    check(c.final_time > 0.0 && c.n_intervals >= 1, 0, "invalid time grid");
    check(c.bloch_target == "saturate" || c.bloch_target == "single", 0,
          "bloch_target must be saturate or single");
    check(c.target_index >= 1 && c.target_index <= static_cast<int>(c.omegas.size()), 0,
          "target_index out of range");
  } else {
    check(c.nx >= 2 && c.ny >= 2, 0, "mesh needs at least 2x2 vertices");
    check(c.youngs > 0.0 && c.poisson > 0.0 && c.poisson < 0.5, 0, "invalid material");
    check(c.elastic_target == "rotation" || c.elastic_target == "deadload", 0,
          "elastic_target must be rotation or deadload");
    check(c.deadload_noise >= 0.0, 0, "deadload_noise must be non-negative");
  }
  check(c.gamma_min > 0.0 && c.gamma0 > c.gamma_min, 0, "need gamma0 > gamma_min > 0");
  check(c.gamma_factor > 0.0 && c.gamma_factor < 1.0, 0, "gamma_factor must be in (0,1)");
  check(c.tol_abs > 0.0 && c.tol_rel > 0.0 && c.krylov_tol > 0.0, 0,
        "tolerances must be positive");
  check(c.max_iter >= 0 && c.krylov_max >= 1 && c.ls_max_halvings >= 0, 0,
        "invalid iteration caps");
  check(c.ls_factor > 0.0 && c.ls_factor < 1.0, 0, "ls_factor must be in (0,1)");
  return c;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const ExperimentConfig &c) {
  std::ostringstream o;
  auto kv = [&](const char *k, const std::string &v) { o << k << " = " << v << '\n'; };
  auto real = [&](const char *k, double v) { kv(k, format_real(v)); };
  kv("model", c.model);
  kv("penalty", c.penalty);
  real("alpha", c.alpha);
  kv("seed", std::to_string(c.seed));
  real("omega0", c.omega0);
  if (!c.phases.empty()) kv("phases", join(c.phases));
  if (!c.omegas.empty()) kv("omegas", join(c.omegas));
  real("final_time", c.final_time);
  kv("n_intervals", std::to_string(c.n_intervals));
  real("gyro", c.gyro);
  real("field", c.field);
  kv("bloch_target", c.bloch_target);
  kv("target_index", std::to_string(c.target_index));
  kv("nx", std::to_string(c.nx));
  kv("ny", std::to_string(c.ny));
  real("youngs", c.youngs);
  real("poisson", c.poisson);
  kv("elastic_target", c.elastic_target);
  real("rotation_angle", c.rotation_angle);
  real("deadload_magnitude", c.deadload_magnitude);
  real("deadload_noise", c.deadload_noise);
  kv("lumped_control_mass", c.lumped_control_mass ? "true" : "false");
  real("gamma0", c.gamma0);
  real("gamma_factor", c.gamma_factor);
  real("gamma_min", c.gamma_min);
  real("tol_abs", c.tol_abs);
  real("tol_rel", c.tol_rel);
  kv("max_iter", std::to_string(c.max_iter));
  real("krylov_tol", c.krylov_tol);
  kv("krylov_max", std::to_string(c.krylov_max));
  real("ls_factor", c.ls_factor);
  kv("ls_max_halvings", std::to_string(c.ls_max_halvings));
  kv("output_dir", c.output_dir);
  return o.str();
}

} // namespace multibang
