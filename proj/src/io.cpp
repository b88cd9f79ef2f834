#include "hartree/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hartree::io {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<Eigen::VectorXd>& columns,
                      const std::string& config_hash) {
  if (header.size() != columns.size()) throw ParameterError("CSV header and column counts differ");
  const Eigen::Index rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ParameterError("CSV columns have different lengths");
  std::string out = "# config_hash=" + config_hash + "\n";
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += "\n";
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) out += (k ? "," : "") + format_double(columns[k][i]);
    out += "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const SharpConstants& c) {
  return Json{{"p", c.p},         {"p_minus_1", c.p_minus_1}, {"S_n", c.S_n},
              {"H_n", c.H_n},     {"K_n", c.K_n},             {"C_n", c.C_n},
              {"omega_n", c.omega}, {"omega_nm1", c.omega_nm1}, {"omega_nm2", c.omega_nm2}};
}

Json to_json(const ResidualReport& r) {
  return Json{{"form", r.form == ResidualForm::Differential ? "differential" : "integral"},
              {"relative_norm", r.relative_norm},
              {"max_relative", r.max_relative},
              {"c_F", r.c_F},
              {"c_2", r.c_2},
              {"window", {r.window_lo, r.window_hi}}};
}

Json to_json(const HlsCheck& h) {
  return Json{{"double_integral", h.double_integral}, {"norm_sq", h.norm_sq}, {"H_n", h.H_n}, {"ratio", h.ratio}};
}

Json to_json(const DispersionRoot& d) {
  return Json{{"U_c", d.U_c}, {"found", d.found}, {"omega0", d.omega0}, {"L0", d.L0}, {"diagnostic", d.diagnostic}};
}

Json to_json(const DelaunaySolution& s) {
  const Eigen::VectorXd& v = s.profile.values();
  Json log = Json::array();
  for (const ContinuationStep& c : s.log)
    log.push_back({{"epsilon", c.epsilon},
                   {"period", c.period},
                   {"residual", c.residual},
                   {"iterations", c.iterations},
                   {"accepted", c.accepted}});
  return Json{{"epsilon", s.epsilon},
              {"period", s.period},
              {"residual_norm", s.residual_norm},
              {"converged", s.converged},
              {"partial", s.partial},
              {"constant", s.constant},
              {"U_c", s.U_c},
              {"L0", s.L0},
              {"max", v.size() ? v.maxCoeff() : 0.0},
              {"min", v.size() ? v.minCoeff() : 0.0},
              {"points", v.size()},
              {"newton_history", s.newton_history},
              {"diagnostic", s.diagnostic},
              {"continuation", log}};
}

Json to_json(const KernelSpotCheck& k) {
  return Json{{"samples", k.samples},   {"positive_2", k.positive_2}, {"positive_alpha", k.positive_alpha},
              {"min_2", k.min_2},       {"min_alpha", k.min_alpha},   {"boundary_max", k.boundary_max},
              {"passed", k.passed()}};
}

Json to_json(const ComparisonReport& r) {
  Json j{{"center", to_json(r.inversion.center)},
         {"mu", r.inversion.mu},
         {"test_points", r.test_points.size()},
         {"min_deficit", r.min_deficit},
         {"min_relative", r.min_relative},
         {"max_abs_relative", r.deficits.size() ? (r.deficits.array().abs() / r.scales.array()).maxCoeff() : 0.0},
         {"violations", r.violations.size()},
         {"tol", r.tol},
         {"nonnegative", r.nonnegative()}};
  if (r.critical_radius) j["critical_radius"] = *r.critical_radius;
  if (r.kernels) j["kernels"] = to_json(*r.kernels);
  return j;
}

Json to_json(const CriticalRadius& c) {
  return Json{{"mu_bar", c.mu_bar},
              {"unbounded", c.unbounded},
              {"ceiling", c.ceiling},
              {"distance_to_abs_x", c.distance_to_abs_x},
              {"evaluations", c.evaluations},
              {"diagnostic", c.diagnostic}};
}

Json to_json(const EqualityFit& f) {
  return Json{{"x0", to_json(f.x0)},       {"mu_bar", f.mu_bar},         {"amplitude", f.amplitude},
              {"fit_error", f.fit_error},  {"constant", f.constant},     {"bubble", f.bubble},
              {"iterations", f.iterations}, {"diagnostic", f.diagnostic}};
}

Json to_json(const UpperBoundScan& s) {
  return Json{{"sup", s.sup},
              {"small_slope", s.small_slope},
              {"growth", s.growth},
              {"divergent", s.divergent},
              {"s_min", s.s.size() ? s.s.minCoeff() : 0.0},
              {"s_max", s.s.size() ? s.s.maxCoeff() : 0.0}};
}

Json to_json(const SymmetryScan& s) {
  Json j{{"radial", s.radial}, {"certified", s.certified}, {"max_ratio", s.ratio.size() ? s.ratio.maxCoeff() : 0.0}};
  j["slope"] = s.slope ? Json(*s.slope) : Json(nullptr);
  return j;
}

Json to_json(const ProfileFit& f) {
  Json minima = Json::array();
  for (const auto& [tau, val] : f.local_minima) minima.push_back({tau, val});
  const Eigen::Index m = f.error.size();
  return Json{{"candidate", f.candidate},
              {"tau", f.tau},
              {"objective", f.objective},
              {"error_at_r_min", m ? f.error[m - 1] : 0.0},
              {"max_error", m ? f.error.maxCoeff() : 0.0},
              {"decreasing", f.decreasing},
              {"accepted", f.accepted},
              {"multistart_spread", f.multistart_spread},
              {"local_minima", minima}};
}

std::string profile_csv(const RadialProfile& u, const std::string& config_hash) {
  return csv_table({"r", "u"}, {u.grid().nodes(), u.values()}, config_hash);
}

std::string profile_csv(const CylinderProfile& U, const std::string& config_hash) {
  return csv_table({"t", "U"}, {U.t_nodes(), U.values()}, config_hash);
}

}  // namespace hartree::io
