#include "hartree/cli/config.hpp"

#include <algorithm>

namespace hartree::cli {

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"constants",     "bubble-check", "kernel",   "delaunay",
                                              "moving-spheres", "asymptotics", "hls-check"};
  return names;
}

Json default_config() {
  return Json{
      {"params", {{"n", 3}, {"alpha", 2.0}}},
      {"seed", 1},
      {"output_dir", "hartree_out"},
      {"tol", 1e-10},
      {"bubble_check",
       {{"r_min", 1e-4},
        {"r_max", 1e4},
        {"per_decade", 100},
        {"window_lo", 0.05},
        {"window_hi", 20.0},
        {"max_residual", 1e-3}}},
      {"kernel", {{"t_max", 10.0}, {"dt", 0.1}, {"pairs", 100}, {"max_error", 1e-8}}},
      {"delaunay",
       {{"epsilon_target", 1e-3},
        {"periods", Json::array({1.05})},
        {"continuation_steps", 200},
        {"collocation", 128},
        {"max_residual", 1e-6}}},
      {"moving_spheres",
       {{"field", "singular"},
        {"center", Json::array({0.5})},
        {"mu", Json::array({0.1, 0.5, 1.0, 2.0})},
        {"bubble_center", Json::array({0.1})},
        {"bubble_mu", 2.0},
        {"shells", 24},
        {"per_shell", 128},
        {"ray_points", 512},
        {"kernel_samples", 200},
        {"fit_shells", 32},
        {"fit_per_shell", 64}}},
      {"asymptotics",
       {{"field", "singular"},
        {"r_max", 1.0},
        {"decades", 4.0},
        {"offset", 0.05},
        {"tau", 0.7},
        {"order", 20},
        {"delaunay_period", 0.0}}},
      {"hls_check", {{"r_min", 1e-4}, {"r_max", 1e4}, {"per_decade", 100}, {"max_error", 1e-3}}},
  };
}

namespace {

bool same_kind(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
  return a.type() == b.type();
}

const char* kind_name(const Json& a) {
  if (a.is_number_integer()) return "integer";
  if (a.is_number()) return "number";
  return a.type_name();
}

void check_array(const Json& proto, const Json& value, const std::string& path) {
  if (proto.empty()) return;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!same_kind(proto[0], value[i])) throw ConfigError(p, std::string("expected ") + kind_name(proto[0]));
  }
}

}  // namespace

Json merge_config(const Json& base, const Json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError(path, "expected an object");
  Json out = base;
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(p, "unknown key");
    const Json& proto = base.at(it.key());
    if (proto.is_object()) {
      out[it.key()] = merge_config(proto, it.value(), p);
    } else {
      if (!same_kind(proto, it.value())) throw ConfigError(p, std::string("expected ") + kind_name(proto));
      if (proto.is_array()) check_array(proto, it.value(), p);
      // Integral values given for a float field are stored as floats, so hashes do not
      // depend on how a number was spelled.
      if (proto.is_number_float() && it.value().is_number_integer())
        out[it.key()] = it.value().get<double>();
      else
        out[it.key()] = it.value();
    }
  }
  return out;
}

Json set_patch(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "expected key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  Json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError(key, "empty path component");
    patch = Json{{*it, patch}};
  }
  return patch;
}

namespace {

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

double num(const Json& c, const char* section, const char* key) { return c.at(section).at(key).get<double>(); }

std::string at(const char* section, const char* key) { return std::string(section) + "." + key; }

}  // namespace

void validate_config(const Json& c) {
  const int n = c.at("params").at("n").get<int>();
  const double alpha = c.at("params").at("alpha").get<double>();
  require(n >= 3 && n <= 5, "params.n", "dimension must be 3, 4 or 5");
  require(alpha > 0.0 && alpha < n, "params.alpha", "must lie in (0, n)");
  require(c.at("seed").get<long long>() >= 0, "seed", "must be nonnegative");
  require(c.at("tol").get<double>() > 0.0, "tol", "must be positive");
  require(!c.at("output_dir").get<std::string>().empty(), "output_dir", "must not be empty");

  require(num(c, "bubble_check", "r_min") > 0.0, at("bubble_check", "r_min"), "must be positive");
  require(num(c, "bubble_check", "r_max") > num(c, "bubble_check", "r_min"), at("bubble_check", "r_max"),
          "must exceed r_min");
  require(c["bubble_check"]["per_decade"].get<int>() >= 16, at("bubble_check", "per_decade"), "must be >= 16");
  require(num(c, "bubble_check", "window_lo") > 0.0 &&
              num(c, "bubble_check", "window_hi") > num(c, "bubble_check", "window_lo"),
          at("bubble_check", "window_hi"), "window must satisfy 0 < window_lo < window_hi");

  require(num(c, "kernel", "t_max") > 0.0, at("kernel", "t_max"), "must be positive");
  require(num(c, "kernel", "dt") > 0.0, at("kernel", "dt"), "must be positive");
  require(c["kernel"]["pairs"].get<int>() >= 1, at("kernel", "pairs"), "must be >= 1");

  require(num(c, "delaunay", "epsilon_target") > 0.0, at("delaunay", "epsilon_target"), "must be positive");
  const Json& periods = c["delaunay"]["periods"];
  for (std::size_t i = 0; i < periods.size(); ++i)
    require(periods[i].get<double>() > 1.0, "delaunay.periods[" + std::to_string(i) + "]",
            "period factors are relative to L0 and must exceed 1");
  require(c["delaunay"]["continuation_steps"].get<int>() >= 1, at("delaunay", "continuation_steps"), "must be >= 1");
  const int coll = c["delaunay"]["collocation"].get<int>();
  require(coll >= 16 && coll <= 2048 && coll % 2 == 0, at("delaunay", "collocation"), "must be even in [16, 2048]");

  const Json& ms = c["moving_spheres"];
  const std::string field = ms["field"].get<std::string>();
  require(field == "singular" || field == "bubble" || field == "constant", at("moving_spheres", "field"),
          "must be singular, bubble or constant");
  for (const char* k : {"center", "bubble_center"})
    require(ms[k].size() >= 1 && ms[k].size() <= static_cast<std::size_t>(n), at("moving_spheres", k),
            "needs between 1 and n coordinates");
  for (std::size_t i = 0; i < ms["mu"].size(); ++i)
    require(ms["mu"][i].get<double>() > 0.0, "moving_spheres.mu[" + std::to_string(i) + "]", "must be positive");
  require(ms["bubble_mu"].get<double>() > 0.0, at("moving_spheres", "bubble_mu"), "must be positive");
  for (const char* k : {"shells", "fit_shells"})
    require(ms[k].get<int>() >= 2, at("moving_spheres", k), "must be >= 2");
  for (const char* k : {"per_shell", "fit_per_shell"})
    require(ms[k].get<int>() >= 1, at("moving_spheres", k), "must be >= 1");
  require(ms["ray_points"].get<int>() >= 2, at("moving_spheres", "ray_points"), "must be >= 2");
  require(ms["kernel_samples"].get<int>() >= 0, at("moving_spheres", "kernel_samples"), "must be >= 0");

  const Json& as = c["asymptotics"];
  const std::string af = as["field"].get<std::string>();
  require(af == "singular" || af == "supercritical" || af == "bubble" || af == "offcenter_bubble" ||
              af == "violator" || af == "perturbed_bubble",
          at("asymptotics", "field"),
          "must be singular, supercritical, bubble, offcenter_bubble, violator or perturbed_bubble");
  require(as["r_max"].get<double>() > 0.0, at("asymptotics", "r_max"), "must be positive");
  require(as["decades"].get<double>() > 0.0 && as["decades"].get<double>() <= 4.0, at("asymptotics", "decades"),
          "must lie in (0, 4]");
  require(as["order"].get<int>() >= 2, at("asymptotics", "order"), "must be >= 2");
  const double dp = as["delaunay_period"].get<double>();
  require(dp == 0.0 || dp > 1.0, at("asymptotics", "delaunay_period"), "0 (off) or a factor above 1 of L0");

  require(num(c, "hls_check", "r_min") > 0.0 && num(c, "hls_check", "r_max") > num(c, "hls_check", "r_min"),
          at("hls_check", "r_max"), "needs 0 < r_min < r_max");
  require(c["hls_check"]["per_decade"].get<int>() >= 16, at("hls_check", "per_decade"), "must be >= 16");
}

std::string config_hash(const std::string& command, const Json& config) {
  Json c = config;
  c.erase("output_dir");
  return io::fnv1a_hex(command + "\n" + c.dump());
}

ProblemParams params_of(const Json& config) {
  return ProblemParams(config.at("params").at("n").get<int>(), config.at("params").at("alpha").get<double>());
}

}  // namespace hartree::cli
