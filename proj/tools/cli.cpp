#include "cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>

#include "roaflow/curve_io.hpp"
#include "roaflow/estimator.hpp"
#include "roaflow/integrator.hpp"
#include "roaflow/oracle.hpp"
#include "roaflow/parallel.hpp"
#include "roaflow/systems.hpp"
#include "roaflow/trajectory.hpp"

namespace roaflow::cli {

std::vector<std::string> preset_names() { return {"vdp", "unbounded", "rational"}; }

Preset preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  // Shared setup: D = 50 points from a circle of radius 0.1, energy over
  // 40 samples spaced 0.1 apart.
  p.flow.points = 50;
  p.flow.init_radius = 0.1;
  p.flow.energy.dt = 0.1;
  p.flow.energy.horizon = 3.9;
  if (name == "vdp") {
    p.system = "vdp_reverse";
    p.flow.gamma = 1.0;
    p.has_reference_curve = true;
  } else if (name == "unbounded") {
    p.system = "unbounded";
    p.flow.gamma = 1.0;
    // Trajectories leave slowly near the saddles; a 3.9 window cannot tell
    // them from convergent ones. The curve keeps growing along the stable
    // strip, so the run is cut off after a fixed number of iterations.
    p.flow.energy.escape_horizon = 20.0;
    p.flow.max_iters = 450;
  } else if (name == "rational") {
    p.system = "rational";
    p.flow.gamma = 0.7;
    // The 0.7 level set is elongated; its tips are approached slowly.
    p.flow.step_size = 0.1;
    p.flow.max_iters = 4000;
  } else {
    throw InputError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

namespace {

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Shortest text that reads back to the same double.
std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open '" + path + "' for writing");
  write(file);
  if (!file) throw InputError("failed writing '" + path + "'");
}

QuadratureRule parse_rule(const std::string& s) {
  if (s == "trapezoid") return QuadratureRule::trapezoid;
  if (s == "rectangle") return QuadratureRule::rectangle;
  throw InputError("unknown quadrature rule '" + s + "'");
}

JacobianSource parse_source(const std::string& s) {
  if (s == "analytic") return JacobianSource::analytic;
  if (s == "data") return JacobianSource::data_driven;
  throw InputError("unknown jacobian source '" + s + "' (analytic|data)");
}

template <class T>
void override_if_set(const CLI::Option* opt, const T& value, T& target) {
  if (opt->count() > 0) target = value;
}

struct Globals {
  int threads = 0;
  std::uint64_t seed = 0;
};

// Options shared by the commands that evaluate the residual energy.
struct EnergyArgs {
  double horizon = 3.9;
  double dt = 0.1;
  int samples = 0;
  double escape_horizon = 0.0;
  std::string rule = "trapezoid";
  std::string jacobian = "data";
  double probe_radius = 0.1;
  int probes = 8;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* samples_opt = nullptr;
  CLI::Option* escape_opt = nullptr;

  void add_to(CLI::App* app) {
    horizon_opt = app->add_option("--horizon", horizon, "Gram window length")->check(CLI::PositiveNumber);
    dt_opt = app->add_option("--dt", dt, "sample spacing")->check(CLI::PositiveNumber);
    samples_opt = app->add_option("--samples", samples, "samples per window; sets horizon = (N-1)*dt")
                      ->check(CLI::Range(2, 1000000));
    escape_opt = app->add_option("--escape-horizon", escape_horizon,
                                 "integrate this long to decide escape")
                     ->check(CLI::PositiveNumber);
    app->add_option("--rule", rule, "quadrature rule")
        ->check(CLI::IsMember({"trapezoid", "rectangle"}));
    app->add_option("--jacobian", jacobian, "reference matrix: data-driven probes or analytic")
        ->check(CLI::IsMember({"data", "analytic"}));
    app->add_option("--probe-radius", probe_radius, "radius of the near-origin probes")
        ->check(CLI::PositiveNumber);
    app->add_option("--probes", probes, "number of near-origin probes")->check(CLI::Range(1, 100000));
  }

  void apply(EnergyConfig& cfg) const {
    override_if_set(dt_opt, dt, cfg.dt);
    override_if_set(horizon_opt, horizon, cfg.horizon);
    if (samples_opt->count() > 0) cfg.horizon = (samples - 1) * cfg.dt;
    if (escape_opt->count() > 0) cfg.escape_horizon = escape_horizon;
    cfg.rule = parse_rule(rule);
  }

  [[nodiscard]] ReferenceJacobianOptions reference(std::uint64_t seed) const {
    ReferenceJacobianOptions r;
    r.source = parse_source(jacobian);
    r.radius = probe_radius;
    r.probes = probes;
    r.seed = seed;
    return r;
  }
};

struct EstimateArgs {
  std::string system;
  std::string traj;
  std::vector<double> x0;
  double horizon = 3.9;
  double dt = 0.1;
  std::string rule = "trapezoid";
  double pe_tol = 0.0;
  CLI::Option* pe_tol_opt = nullptr;
  bool diagnostic = false;
  std::string out;
  std::string save_traj;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  if (a.system.empty() == a.traj.empty()) throw InputError("give exactly one of --system or --traj");
  Trajectory traj;
  if (!a.traj.empty()) {
    traj = load_trajectory(a.traj);
    if (!traj.has_derivatives()) traj = derivatives_from_samples(std::move(traj));
  } else {
    const VectorField field = lookup_system(a.system);
    if (static_cast<int>(a.x0.size()) != field.dimension) {
      throw InputError("--x0 needs " + std::to_string(field.dimension) + " components");
    }
    IntegratorOptions opts;
    opts.dt = a.dt;
    traj = integrate(field, to_vector(a.x0), a.horizon, opts);
  }
  if (!a.save_traj.empty()) save_trajectory(traj, a.save_traj);

  MinimizerOptions mopts;
  if (a.pe_tol_opt->count() > 0) mopts.pe_tol = a.pe_tol;
  mopts.diagnostic = a.diagnostic;
  const LinearEstimate est = estimate_linear_model(traj, parse_rule(a.rule), mopts);
  std::string report = format_estimate_report(est);
  report += "samples=" + std::to_string(traj.size()) + "\n";
  report += "termination=" + std::string(to_string(traj.termination)) + "\n";
  out << report;
  if (!a.out.empty()) emit(a.out, out, [&](std::ostream& o) { o << report; });
  return kOk;
}

struct RoaArgs {
  std::string preset = "vdp";
  std::string system;
  double gamma = 1.0;
  double step = 0.02;
  int max_iters = 2000;
  double conv_tol = 1e-5;
  int points = 50;
  double init_radius = 0.1;
  int resample_every = 5;
  int history_every = 10;
  bool no_guard = false;
  bool compare_oracle = false;
  bool strict = false;
  int reference_points = 400;
  std::string history;
  std::string curve;
  std::string svg;
  EnergyArgs energy;
  std::vector<std::pair<CLI::Option*, std::function<void(FlowConfig&)>>> overrides;
  CLI::Option* system_opt = nullptr;
};

void add_roa_options(CLI::App* sub, RoaArgs& a) {
  sub->add_option("--preset", a.preset, "experiment setup")->check(CLI::IsMember(preset_names()));
  a.system_opt = sub->add_option("--system", a.system, "override the preset's system");
  const auto flow_opt = [&](const std::string& name, auto& value, const std::string& help,
                            auto member) {
    CLI::Option* o = sub->add_option(name, value, help);
    a.overrides.emplace_back(o, [&value, member](FlowConfig& cfg) { cfg.*member = value; });
    return o;
  };
  flow_opt("--gamma", a.gamma, "speed offset in (0,1]", &FlowConfig::gamma)
      ->check(CLI::Range(0.0, 1.0));
  flow_opt("--step", a.step, "flow pseudo-time per iteration", &FlowConfig::step_size)
      ->check(CLI::PositiveNumber);
  flow_opt("--max-iters", a.max_iters, "iteration cap", &FlowConfig::max_iters)
      ->check(CLI::PositiveNumber);
  flow_opt("--points", a.points, "curve points D", &FlowConfig::points)->check(CLI::Range(3, 100000));
  flow_opt("--init-radius", a.init_radius, "initial circle radius", &FlowConfig::init_radius)
      ->check(CLI::PositiveNumber);
  flow_opt("--resample-every", a.resample_every, "resampling period (0 disables)",
           &FlowConfig::resample_every)
      ->check(CLI::NonNegativeNumber);
  flow_opt("--history-every", a.history_every, "snapshot period (0: first and last only)",
           &FlowConfig::history_every)
      ->check(CLI::NonNegativeNumber);
  CLI::Option* tol = sub->add_option("--conv-tol", a.conv_tol, "displacement tolerance")
                         ->check(CLI::PositiveNumber);
  a.overrides.emplace_back(tol, [&a](FlowConfig& cfg) { cfg.conv_tol = a.conv_tol; });
  sub->add_flag("--no-escape-guard", a.no_guard, "accept moves onto escaped points");
  sub->add_flag("--compare-oracle", a.compare_oracle, "report oracle membership and distance");
  sub->add_option("--reference-points", a.reference_points, "oracle curve resolution")
      ->check(CLI::Range(8, 1000000));
  sub->add_flag("--strict", a.strict, "exit 3 unless the flow converged");
  sub->add_option("--history", a.history, "history CSV path");
  sub->add_option("--curve", a.curve, "final curve CSV path");
  sub->add_option("--svg", a.svg, "SVG path");
  a.energy.add_to(sub);
}

int cmd_roa(const RoaArgs& a, const Globals& g, std::ostream& out) {
  Preset p = preset(a.preset);
  if (a.system_opt->count() > 0) {
    p.system = a.system;
    p.has_reference_curve = p.system == "vdp_reverse";
  }
  FlowConfig cfg = p.flow;
  for (const auto& [opt, set] : a.overrides) {
    if (opt->count() > 0) set(cfg);
  }
  cfg.escape_guard = !a.no_guard;
  cfg.threads = g.threads;
  a.energy.apply(cfg.energy);
  cfg.validate();

  const VectorField field = lookup_system(p.system);
  if (field.dimension != 2) throw InputError("the boundary flow needs a planar system");
  const int threads = resolve_thread_count(g.threads);
  const Matrix a_ref = reference_jacobian(field, a.energy.reference(g.seed), cfg.energy, threads);
  const FlowResult result = run_flow(field, a_ref, cfg);

  std::optional<BoundaryCurve> reference;
  if (p.has_reference_curve && (a.compare_oracle || !a.svg.empty())) {
    reference = reference_limit_cycle(a.reference_points);
  }

  out << "preset=" << p.name << "\n"
      << "system=" << p.system << "\n"
      << "gamma=" << format_number(cfg.gamma) << "\n"
      << "step=" << format_number(cfg.step_size) << "\n"
      << "points=" << cfg.points << "\n"
      << "init_radius=" << format_number(cfg.init_radius) << "\n"
      << "horizon=" << format_number(cfg.energy.horizon) << "\n"
      << "dt=" << format_number(cfg.energy.dt) << "\n"
      << "seed=" << g.seed << "\n"
      << "a_ref=";
  for (Eigen::Index i = 0; i < a_ref.rows(); ++i) {
    for (Eigen::Index j = 0; j < a_ref.cols(); ++j) out << (i + j ? " " : "") << format_number(a_ref(i, j));
  }
  out << "\n"
      << "status=" << to_string(result.status) << "\n"
      << "iterations=" << result.iterations << "\n"
      << "rejected_moves=" << result.rejected_moves << "\n";
  if (!result.message.empty()) out << "message=" << result.message << "\n";

  if (a.compare_oracle) {
    const auto labels = roa_membership(field, result.final.points, {}, threads);
    std::size_t inside = 0;
    for (const Membership m : labels) inside += m == Membership::inside ? 1 : 0;
    out << "oracle_inside=" << inside << "/" << labels.size() << "\n";
    if (reference) out << "hausdorff=" << format_number(hausdorff_distance(result.final, *reference)) << "\n";
  }

  if (!a.history.empty()) emit(a.history, out, [&](std::ostream& o) { write_history_csv(o, result.history); });
  if (!a.curve.empty()) emit(a.curve, out, [&](std::ostream& o) { write_curve_csv(o, result.final); });
  if (!a.svg.empty()) emit(a.svg, out, [&](std::ostream& o) { write_svg(o, result.history, reference); });

  if (a.strict && result.status != FlowStatus::converged) return kFlowFailure;
  return kOk;
}

struct GridArgs {
  std::string system = "vdp_reverse";
  std::vector<double> rect{-3.0, 3.0, -3.0, 3.0};
  int res = 50;
  std::string out;
  EnergyArgs energy;
};

int cmd_energy_grid(const GridArgs& a, const Globals& g, std::ostream& out) {
  if (a.rect.size() != 4) throw InputError("--rect needs x_min,x_max,y_min,y_max");
  GridSpec grid{a.rect[0], a.rect[1], a.rect[2], a.rect[3], a.res};
  if (!(grid.x_min < grid.x_max) || !(grid.y_min < grid.y_max)) {
    throw InputError("--rect needs x_min < x_max and y_min < y_max");
  }
  if (grid.resolution < 2) throw InputError("--res must be at least 2");
  const VectorField field = lookup_system(a.system);
  if (field.dimension != 2) throw InputError("energy-grid needs a planar system");
  EnergyConfig cfg;
  a.energy.apply(cfg);
  const int threads = resolve_thread_count(g.threads);
  const Matrix a_ref = reference_jacobian(field, a.energy.reference(g.seed), cfg, threads);
  const auto samples = energy_grid(field, a_ref, grid, cfg, threads);
  emit(a.out, out, [&](std::ostream& o) { write_energy_grid_csv(o, samples); });
  return kOk;
}

struct CycleArgs {
  int d = 400;
  double transient = 100.0;
  std::string out;
};

int cmd_cycle(const CycleArgs& a, std::ostream& out) {
  const LimitCycle cycle = van_der_pol_limit_cycle(a.d, a.transient);
  emit(a.out, out, [&](std::ostream& o) { write_curve_csv(o, cycle.curve); });
  if (!a.out.empty() && a.out != "-") {
    out << "period=" << format_number(cycle.period) << "\n"
        << "amplitude=" << format_number(cycle.section_point.x()) << "\n";
  }
  return kOk;
}

struct MemberArgs {
  std::string system = "vdp_reverse";
  std::vector<double> x0;
  double t_max = 200.0;
};

int cmd_member(const MemberArgs& a, std::ostream& out) {
  const VectorField field = lookup_system(a.system);
  if (static_cast<int>(a.x0.size()) != field.dimension) {
    throw InputError("--x0 needs " + std::to_string(field.dimension) + " components");
  }
  MembershipOptions opts;
  opts.t_max = a.t_max;
  out << to_string(roa_membership(field, to_vector(a.x0), opts)) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Region-of-attraction estimation from trajectory data", "roaflow"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file; [section] per subcommand, key = flag name");
  app.allow_config_extras(CLI::config_extras_mode::error);
  std::string dump_config;
  app.add_option("--dump-config", dump_config, "write the effective options as a config file");

  Globals globals;
  app.add_option("--threads", globals.threads, "worker threads (default: ROAFLOW_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", globals.seed, "seed for probe placement");

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "fit a linear model to one trajectory");
  estimate->add_option("--system", est.system, "system id to simulate");
  estimate->add_option("--traj", est.traj, "recorded trajectory CSV");
  estimate->add_option("--x0", est.x0, "initial state, comma separated")->delimiter(',');
  estimate->add_option("--horizon", est.horizon, "simulation length")->check(CLI::NonNegativeNumber);
  estimate->add_option("--dt", est.dt, "sample spacing")->check(CLI::PositiveNumber);
  estimate->add_option("--rule", est.rule, "quadrature rule")->check(CLI::IsMember({"trapezoid", "rectangle"}));
  est.pe_tol_opt = estimate->add_option("--pe-tol", est.pe_tol, "excitation threshold on lambda_min")
                       ->check(CLI::NonNegativeNumber);
  estimate->add_flag("--diagnostic", est.diagnostic, "pseudo-solve instead of failing on poor excitation");
  estimate->add_option("--out", est.out, "also write the report here");
  estimate->add_option("--save-traj", est.save_traj, "write the simulated trajectory CSV");

  RoaArgs roa;
  CLI::App* roa_cmd = app.add_subcommand("roa", "evolve a boundary curve under the flow");
  add_roa_options(roa_cmd, roa);

  GridArgs grid;
  CLI::App* grid_cmd = app.add_subcommand("energy-grid", "residual energy over a rectangle");
  grid_cmd->add_option("--system", grid.system, "system id");
  grid_cmd->add_option("--rect", grid.rect, "x_min,x_max,y_min,y_max")->delimiter(',')->expected(1, 4);
  grid_cmd->add_option("--res", grid.res, "samples per axis");
  grid_cmd->add_option("--out", grid.out, "CSV path (default stdout)");
  grid.energy.add_to(grid_cmd);

  CLI::App* oracle = app.add_subcommand("oracle", "ground-truth helpers");
  oracle->require_subcommand(1);
  CycleArgs cyc;
  CLI::App* cycle_cmd = oracle->add_subcommand("cycle", "Van der Pol reference limit cycle");
  cycle_cmd->add_option("--d", cyc.d, "points on the curve")->check(CLI::Range(8, 10000000));
  cycle_cmd->add_option("--transient", cyc.transient, "settling time")->check(CLI::PositiveNumber);
  cycle_cmd->add_option("--out", cyc.out, "CSV path (default stdout)");
  MemberArgs mem;
  CLI::App* member_cmd = oracle->add_subcommand("member", "classify one initial state");
  member_cmd->add_option("--system", mem.system, "system id");
  member_cmd->add_option("--x0", mem.x0, "initial state, comma separated")->delimiter(',')->required();
  member_cmd->add_option("--t-max", mem.t_max, "integration cap")->check(CLI::PositiveNumber);

  for (CLI::App* sub : {estimate, roa_cmd, grid_cmd, oracle, cycle_cmd, member_cmd}) sub->fallthrough();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("roaflow");
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (!dump_config.empty()) {
      emit(dump_config, out, [&](std::ostream& o) { o << app.config_to_str(true, false); });
    }
    if (estimate->parsed()) return cmd_estimate(est, out);
    if (roa_cmd->parsed()) return cmd_roa(roa, globals, out);
    if (grid_cmd->parsed()) return cmd_energy_grid(grid, globals, out);
    if (cycle_cmd->parsed()) return cmd_cycle(cyc, out);
    if (member_cmd->parsed()) return cmd_member(mem, out);
  } catch (const PersistencyError& e) {
    err << "error: " << e.what() << "\n";
    return kExcitationFailure;
  } catch (const RankDeficientError& e) {
    err << "error: " << e.what() << "\n";
    return kExcitationFailure;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return kFlowFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace roaflow::cli
