#include "hartree/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hartree/asymptotics.hpp"
#include "hartree/constants.hpp"
#include "hartree/cylinder.hpp"
#include "hartree/delaunay.hpp"
#include "hartree/io.hpp"
#include "hartree/moving_spheres.hpp"
#include "hartree/radial.hpp"
#include "hartree/riesz.hpp"
#include "hartree/rng.hpp"

namespace hartree::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  std::string command;
  Json config;
  std::string hash;
  fs::path dir;
  ProblemParams params;
  double tol = 1e-10;
  std::uint64_t seed = 1;

  void write(const std::string& name, const std::string& bytes) const { io::write_file(dir / name, bytes); }
  void write_json(const std::string& name, Json j) const {
    Json out{{"command", command}, {"config_hash", hash}, {"n", params.n}, {"alpha", params.alpha}};
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
    write(name, io::dump(out));
  }
  const Json& section(const char* key) const { return config.at(key); }
};

Point point_of(const Json& coords, int n) {
  Point p = Point::Zero(n);
  for (std::size_t k = 0; k < coords.size(); ++k) p[static_cast<Eigen::Index>(k)] = coords[k].get<double>();
  return p;
}

std::string file_stem(const std::string& command) {
  std::string s = command;
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

int cmd_constants(const Context& ctx, Json& summary) {
  summary = io::to_json(sharp_constants(ctx.params));
  ctx.write_json("constants.json", summary);
  return Ok;
}

int cmd_bubble_check(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("bubble_check");
  const ProblemParams& P = ctx.params;
  const RadialGrid grid =
      RadialGrid::geometric(c["r_min"].get<double>(), c["r_max"].get<double>(), c["per_decade"].get<int>());
  const RadialProfile u = sample_radial(make_bubble(P, Point::Zero(P.n), 1.0, BubbleNormalization::Hartree), grid);
  ResidualOptions opts;
  opts.window_lo = c["window_lo"].get<double>();
  opts.window_hi = c["window_hi"].get<double>();
  opts.tol = ctx.tol;

  const double c_F = calibrate_c_F(u, P, opts);
  const NonlinearitySpec nl = NonlinearitySpec::critical(P, c_F);
  const ResidualReport diff = residual(u, nl, P, ResidualForm::Differential, opts);
  const ResidualReport integ = residual(u, nl, P, ResidualForm::Integral, opts);
  const double agreement = (diff.relative - integ.relative).cwiseAbs().maxCoeff();
  const double limit = c["max_residual"].get<double>();
  const bool pass = diff.max_relative <= limit && integ.max_relative <= limit && agreement <= limit;

  summary = Json{{"c_F", c_F},
                 {"c_F_closed_form", bubble_c_F(P)},
                 {"c_2_pinned", pin_c_2(u, P.n, opts)},
                 {"c_2_newton", newton_constant(P.n)},
                 {"differential", io::to_json(diff)},
                 {"integral", io::to_json(integ)},
                 {"form_agreement", agreement},
                 {"max_residual", limit},
                 {"pass", pass}};
  ctx.write_json("bubble_check.json", summary);
  ctx.write("bubble_check_residual.csv",
            io::csv_table({"r", "differential", "integral"}, {grid.nodes(), diff.relative, integ.relative}, ctx.hash));
  return pass ? Ok : AccuracyFailure;
}

int cmd_kernel(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("kernel");
  const ProblemParams& P = ctx.params;
  const KernelTable kt = make_kernel_table(P, c["t_max"].get<double>(), c["dt"].get<double>(), ctx.tol);
  const AngularKernelSpec spec = AngularKernelSpec::riesz_alpha(P, ctx.tol);
  const double gamma = spec.gamma();

  const int pairs = c["pairs"].get<int>();
  const CounterRng rng(ctx.seed, 0x4b);
  Eigen::VectorXd rs(pairs), ss(pairs), err(pairs);
  for (int i = 0; i < pairs; ++i) {
    const double r = std::pow(10.0, -2.0 + 4.0 * rng.uniform(2 * static_cast<std::uint64_t>(i)));
    double s = std::pow(10.0, -2.0 + 4.0 * rng.uniform(2 * static_cast<std::uint64_t>(i) + 1));
    if (std::abs(std::log(r / s)) < 1e-3) s *= 1.01;
    const double lhs = std::pow(r * s, gamma) * angular_kernel(spec, r, s);
    const double rhs = kernel_hat(spec, std::log(r / s));
    rs[i] = r;
    ss[i] = s;
    err[i] = std::abs(lhs - rhs) / std::abs(rhs);
  }

  double parity = 0;
  const Eigen::Index m = kt.t.size();
  for (Eigen::Index i = 0; i < m; ++i) parity = std::max(parity, std::abs(kt.values[i] - kt.values[m - 1 - i]) / kt.values[i]);
  const double t_max = kt.t[m - 1];
  const double decay = std::exp(gamma * t_max) * kt.values[m - 1] / kt.decay_constant - 1.0;
  const double limit = c["max_error"].get<double>();
  const bool pass = err.maxCoeff() <= limit;

  summary = Json{{"gamma", gamma},
                 {"decay_constant", kt.decay_constant},
                 {"identity_pairs", pairs},
                 {"identity_max_error", err.maxCoeff()},
                 {"parity_max_error", parity},
                 {"decay_relative_gap_at_t_max", decay},
                 {"max_error", limit},
                 {"pass", pass}};
  ctx.write_json("kernel.json", summary);
  ctx.write("kernel_table.csv", io::csv_table({"t", "kernel_hat"}, {kt.t, kt.values}, ctx.hash));
  ctx.write("kernel_identity.csv", io::csv_table({"r", "s", "relative_error"}, {rs, ss, err}, ctx.hash));
  return pass ? Ok : AccuracyFailure;
}

int cmd_delaunay(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("delaunay");
  const ProblemParams& P = ctx.params;
  const NonlinearitySpec nl = NonlinearitySpec::critical(P, bubble_c_F(P));
  const KernelTable kt = make_kernel_table(P, 10.0, 0.1, ctx.tol);
  const DispersionRoot root = dispersion_root(P, nl, kt);
  summary = Json{{"c_F", nl.c_F}, {"dispersion", io::to_json(root)}, {"solutions", Json::array()}};
  if (!root.found) {
    ctx.write_json("delaunay.json", summary);
    return ConvergenceFailure;
  }
  DelaunayOptions opts;
  opts.collocation = c["collocation"].get<int>();
  opts.tol = ctx.tol;
  const double limit = c["max_residual"].get<double>();
  int code = Ok;
  const Json& periods = c["periods"];
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double factor = periods[i].get<double>();
    const DelaunaySolution sol = find_delaunay(P, nl, c["epsilon_target"].get<double>(), factor * root.L0,
                                               c["continuation_steps"].get<int>(), opts);
    Json j = io::to_json(sol);
    j["period_factor"] = factor;
    summary["solutions"].push_back(j);
    ctx.write("delaunay_" + std::to_string(i) + ".csv", io::profile_csv(sol.profile, ctx.hash));
    if (!sol.converged || sol.partial)
      code = ConvergenceFailure;
    else if (sol.residual_norm > limit && code == Ok)
      code = AccuracyFailure;
  }
  ctx.write_json("delaunay.json", summary);
  return code;
}

int cmd_moving_spheres(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("moving_spheres");
  const ProblemParams& P = ctx.params;
  const int n = P.n;
  const std::string kind = c["field"].get<std::string>();
  Field u;
  if (kind == "singular")
    u = make_power(P, P.nu());
  else if (kind == "bubble")
    u = make_bubble(P, point_of(c["bubble_center"], n), c["bubble_mu"].get<double>(), BubbleNormalization::Hartree);
  else
    u = make_constant(P, 1.0);

  TestSetSpec ts;
  ts.shells = c["shells"].get<int>();
  ts.per_shell = c["per_shell"].get<int>();
  ts.ray_points = c["ray_points"].get<int>();
  ts.seed = ctx.seed;

  Json deficits = Json::array();
  std::vector<double> v_mu, v_def, v_scale;
  std::vector<Point> v_pts;
  for (const Json& m : c["mu"]) {
    const SphereInversion inv(Point::Zero(n), m.get<double>());
    const ComparisonReport rep =
        comparison_deficit(u, inv, make_test_set(n, inv, ts), 1e-8, c["kernel_samples"].get<int>(), ctx.seed);
    deficits.push_back(io::to_json(rep));
    for (int idx : rep.violations) {
      v_mu.push_back(inv.mu);
      v_pts.push_back(rep.test_points[static_cast<std::size_t>(idx)]);
      v_def.push_back(rep.deficits[idx]);
      v_scale.push_back(rep.scales[idx]);
    }
  }

  CriticalRadiusOptions cro;
  cro.test_set = ts;
  const Point x = point_of(c["center"], n);
  summary = Json{{"field", kind}, {"deficits_about_origin", deficits}};
  summary["critical_radius"] = io::to_json(critical_radius(u, x, cro));
  summary["critical_radius"]["center"] = io::to_json(x);
  summary["critical_radius"]["abs_x"] = x.norm();
  if (kind == "singular") {
    summary["equality_fit"] = Json{{"diagnostic", "skipped: field is unbounded at the origin"}};
  } else {
    const auto samples =
        sphere_samples(n, 0.05, 20.0, c["fit_shells"].get<int>(), c["fit_per_shell"].get<int>(), ctx.seed);
    summary["equality_fit"] = io::to_json(equality_fit(u, samples));
  }
  ctx.write_json("moving_spheres.json", summary);

  const std::size_t k = v_mu.size();
  std::vector<Eigen::VectorXd> cols(static_cast<std::size_t>(n) + 3, Eigen::VectorXd(static_cast<Eigen::Index>(k)));
  std::vector<std::string> header{"mu"};
  for (int d = 0; d < n; ++d) header.push_back("y" + std::to_string(d));
  header.push_back("deficit");
  header.push_back("scale");
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    cols[0][r] = v_mu[i];
    for (int d = 0; d < n; ++d) cols[1 + static_cast<std::size_t>(d)][r] = v_pts[i][d];
    cols[static_cast<std::size_t>(n) + 1][r] = v_def[i];
    cols[static_cast<std::size_t>(n) + 2][r] = v_scale[i];
  }
  ctx.write("moving_spheres_violations.csv", io::csv_table(header, cols, ctx.hash));
  return Ok;
}

Field asymptotics_field(const Context& ctx, const Json& c) {
  const ProblemParams& P = ctx.params;
  const int n = P.n;
  const double nu = P.nu();
  const std::string kind = c["field"].get<std::string>();
  if (kind == "singular") return make_power(P, nu);
  if (kind == "supercritical") return make_power(P, n - 2.0);
  if (kind == "bubble") return make_bubble(P, Point::Zero(n), 1.0, BubbleNormalization::Hartree);
  if (kind == "offcenter_bubble") {
    Point x0 = Point::Zero(n);
    x0[0] = c["offset"].get<double>();
    return make_bubble(P, x0, 1.0, BubbleNormalization::Hartree);
  }
  if (kind == "violator")
    return Field(
        P,
        [nu](const Point& x) {
          const double r = x.norm();
          const double c1 = x[0] / r;
          return std::pow(r, -nu) * (1.0 + 0.5 * std::sqrt(std::max(0.0, 1.0 - c1 * c1)));
        },
        false);
  const LimitCandidate cb = LimitCandidate::cylinder_bubble(P);
  const double tau = c["tau"].get<double>();
  return Field(
      P, [cb, tau](const Point& x) {
        const double r = x.norm();
        return (1.0 + r) * cb.value(r, tau);
      },
      true);
}

int cmd_asymptotics(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("asymptotics");
  const ProblemParams& P = ctx.params;
  const Field u = asymptotics_field(ctx, c);
  const Eigen::VectorXd radii = radii_ladder(c["r_max"].get<double>(), c["decades"].get<double>());
  const int order = c["order"].get<int>();

  std::vector<LimitCandidate> candidates{LimitCandidate::cylinder_bubble(P)};
  const double dp = c["delaunay_period"].get<double>();
  Json delaunay = nullptr;
  if (dp > 0.0) {
    const NonlinearitySpec nl = NonlinearitySpec::critical(P, bubble_c_F(P));
    const DispersionRoot root = dispersion_root(P, nl, make_kernel_table(P, 10.0, 0.1, ctx.tol));
    if (!root.found) throw ConvergenceError("no bifurcation from the constant solution: " + root.diagnostic);
    DelaunayOptions opts;
    opts.tol = ctx.tol;
    const DelaunaySolution sol = find_delaunay(P, nl, 1e-3, dp * root.L0, 200, opts);
    if (!sol.converged || sol.partial) throw ConvergenceError("Delaunay candidate did not converge: " + sol.diagnostic);
    delaunay = Json{{"period", sol.period}, {"residual_norm", sol.residual_norm}};
    candidates.push_back(LimitCandidate::periodic(P, sol.profile));
  }

  const AsymptoticsReport rep = asymptotics_suite(u, radii, candidates, order);
  summary = Json{{"field", c["field"]},
                 {"upper_bound", io::to_json(rep.upper)},
                 {"symmetry", io::to_json(rep.symmetry)},
                 {"fits", Json::array()}};
  if (!delaunay.is_null()) summary["delaunay_candidate"] = delaunay;
  for (const ProfileFit& f : rep.fits) {
    summary["fits"].push_back(io::to_json(f));
    ctx.write("asymptotics_fit_" + f.candidate + ".csv", io::csv_table({"r", "error"}, {f.radii, f.error}, ctx.hash));
  }
  ctx.write_json("asymptotics.json", summary);
  ctx.write("asymptotics_upper.csv",
            io::csv_table({"r", "s", "running_sup"}, {rep.upper.radii, rep.upper.s, rep.upper.running_sup}, ctx.hash));
  ctx.write("asymptotics_symmetry.csv",
            io::csv_table({"r", "ratio"}, {rep.symmetry.radii, rep.symmetry.ratio}, ctx.hash));
  return Ok;
}

int cmd_hls_check(const Context& ctx, Json& summary) {
  const Json& c = ctx.section("hls_check");
  const RadialGrid grid =
      RadialGrid::geometric(c["r_min"].get<double>(), c["r_max"].get<double>(), c["per_decade"].get<int>());
  const HlsCheck h = hls_extremal_check(ctx.params, grid, ctx.tol);
  const double limit = c["max_error"].get<double>();
  const bool pass = std::abs(h.ratio - 1.0) <= limit;
  summary = io::to_json(h);
  summary["max_error"] = limit;
  summary["pass"] = pass;
  ctx.write_json("hls_check.json", summary);
  return pass ? Ok : AccuracyFailure;
}

using Handler = std::function<int(const Context&, Json&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"constants", cmd_constants},       {"bubble-check", cmd_bubble_check},
      {"kernel", cmd_kernel},             {"delaunay", cmd_delaunay},
      {"moving-spheres", cmd_moving_spheres}, {"asymptotics", cmd_asymptotics},
      {"hls-check", cmd_hls_check}};
  return h;
}

Json error_json(const char* kind, const std::exception& e) {
  Json j{{"error", kind}, {"message", e.what()}};
  if (const auto* a = dynamic_cast<const AccuracyError*>(&e)) j["achieved"] = a->achieved();
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["path"] = c->path();
  return j;
}

std::string usage() {
  std::string s = "usage: hartree <command> [--config FILE] [--n N] [--alpha A] [--seed S] [--out DIR] "
                  "[--set key.path=value]...\ncommands:";
  for (const std::string& c : command_names()) s += " " + c;
  return s + "\n";
}

}  // namespace

int dispatch(const std::string& command, const Json& config, std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(command);
  if (it == handlers().end()) {
    err << "unknown command '" << command << "'\n" << usage();
    return ConfigFailure;
  }
  Context ctx;
  ctx.command = command;
  const char* kind = "error";
  int code = AccuracyFailure;
  try {
    ctx.config = merge_config(default_config(), config);
    validate_config(ctx.config);
    ctx.params = params_of(ctx.config);
    ctx.hash = config_hash(command, ctx.config);
    ctx.dir = ctx.config["output_dir"].get<std::string>();
    ctx.tol = ctx.config["tol"].get<double>();
    ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    io::write_file(ctx.dir / (file_stem(command) + ".config.json"), io::dump(ctx.config));

    Json summary;
    code = it->second(ctx, summary);
    Json head{{"command", command}, {"config_hash", ctx.hash}, {"exit", code}};
    for (auto s = summary.begin(); s != summary.end(); ++s) head[s.key()] = s.value();
    out << io::dump(head);
    return code;
  } catch (const ConfigError& e) {
    kind = "config";
    code = ConfigFailure;
    err << io::dump(error_json(kind, e));
    return code;
  } catch (const ParameterError& e) {
    kind = "parameter";
    code = ConfigFailure;
    err << io::dump(error_json(kind, e));
    return code;
  } catch (const ConvergenceError& e) {
    kind = "convergence";
    code = ConvergenceFailure;
    err << io::dump(error_json(kind, e));
  } catch (const Error& e) {
    kind = "numerical";
    code = AccuracyFailure;
    err << io::dump(error_json(kind, e));
  } catch (const Json::exception& e) {
    kind = "config";
    err << io::dump(error_json(kind, e));
    return ConfigFailure;
  }
  if (!ctx.dir.empty()) {
    try {
      ctx.write(file_stem(command) + ".error.json", io::dump(Json{{"command", command}, {"config_hash", ctx.hash}, {"error", kind}}));
    } catch (const std::exception&) {
    }
  }
  return code;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical Hartree equation toolkit"};
  app.require_subcommand(1);
  struct Flags {
    std::string config_path;
    std::optional<int> n;
    std::optional<double> alpha;
    std::optional<std::int64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> sets;
  };
  Flags flags;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--n", flags.n, "dimension");
    sub->add_option("--alpha", flags.alpha, "Riesz order");
    sub->add_option("--seed", flags.seed, "seed for randomized test sets");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--set", flags.sets, "override, key.path=value");
  }
  if (argc > 1 && argv[1][0] != '-') {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), argv[1]) == names.end()) {
      err << "unknown command '" << argv[1] << "'\n" << usage();
      return ConfigFailure;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << usage();
    return ConfigFailure;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  Json config = Json::object();
  try {
    if (!flags.config_path.empty()) config = merge_config(default_config(), Json::parse(io::read_file(flags.config_path)));
    Json patch = Json::object();
    if (flags.n) patch["params"]["n"] = *flags.n;
    if (flags.alpha) patch["params"]["alpha"] = *flags.alpha;
    if (flags.seed) patch["seed"] = *flags.seed;
    if (flags.out) patch["output_dir"] = *flags.out;
    config = merge_config(merge_config(default_config(), config), patch);
    for (const std::string& s : flags.sets) config = merge_config(config, set_patch(s));
  } catch (const ConfigError& e) {
    err << io::dump(error_json("config", e));
    return ConfigFailure;
  } catch (const Json::exception& e) {
    err << io::dump(error_json("config", e));
    return ConfigFailure;
  } catch (const Error& e) {
    err << io::dump(error_json("config", e));
    return ConfigFailure;
  }
  return dispatch(command, config, out, err);
}

}  // namespace hartree::cli
