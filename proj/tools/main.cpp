// Command-line front end: degree tables, equilibrium solves, deployment
// optimization, threat sweeps and Monte-Carlo runs, all emitted as CSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadnet/csv.hpp"
#include "spreadnet/degree_model.hpp"
#include "spreadnet/epidemic.hpp"
#include "spreadnet/errors.hpp"
#include "spreadnet/geometry.hpp"
#include "spreadnet/mission.hpp"
#include "spreadnet/optimizer.hpp"
#include "spreadnet/simulate.hpp"
#include "spreadnet/strand.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spreadnet;

// Every run drops a manifest.json next to its outputs: the command, the
// effective parameters, and the files written.
class Manifest {
 public:
  Manifest(std::string command, fs::path out_dir)
      : command_(std::move(command)),
        out_dir_(std::move(out_dir)),
        t0_(std::chrono::steady_clock::now()) {}

  json& params() { return params_; }

  fs::path target(const std::string& name) {
    outputs_.push_back(name);
    return out_dir_ / name;
  }

  void write() const {
    json j;
    j["command"] = command_;
    j["version"] = kVersion;
    if (params_.contains("seed")) j["seed"] = params_.at("seed");
    j["parameters"] = params_;
    j["outputs"] = outputs_;
    const auto dt = std::chrono::steady_clock::now() - t0_;
    j["wall_clock_seconds"] = std::chrono::duration<double>(dt).count();
    std::ofstream out(out_dir_ / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path out_dir_;
  json params_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point t0_;
};

std::vector<double> parse_values(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument(flag + ": cannot parse '" + token + "' as a number");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw std::invalid_argument(flag + ": no values given");
  return values;
}

// "0:0.8:0.1" (start:end:step, inclusive) or a comma list.
std::vector<double> parse_delta_grid(const std::string& text) {
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) return parse_values(text, "--delta");
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("--delta: grid syntax is start:end:step");
  const double start = std::stod(text.substr(0, c1));
  const double end = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (!(step > 0.0) || end < start)
    throw std::invalid_argument("--delta: need end >= start and step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double v = start + i * step;
    if (v > end + 1e-12) break;
    v = std::round(v * 1e12) / 1e12;  // keep accumulated steps printable
    grid.push_back(std::min(v, end));
  }
  return grid;
}

struct DesignArgs {
  std::string lambda_text;
  std::string range_m_text;
  std::string range_km_text;

  std::vector<double> lambdas() const { return parse_values(lambda_text, "--lambda"); }

  std::vector<double> ranges_km() const {
    if (!range_m_text.empty()) {
      auto v = parse_values(range_m_text, "--range-m");
      for (auto& r : v) r /= 1000.0;
      return v;
    }
    return parse_values(range_km_text, "--range-km");
  }

  void check(const std::vector<double>& lam, const std::vector<double>& r) const {
    if (lam.size() != r.size())
      throw std::invalid_argument("--lambda and --range must list one value per layer");
  }
};

void add_design_flags(CLI::App* cmd, DesignArgs& args) {
  cmd->add_option("--lambda", args.lambda_text,
                  "per-layer deployment densities, km^-2 (comma separated)")
      ->required();
  auto* rm = cmd->add_option("--range-m", args.range_m_text,
                             "per-layer communication ranges in meters");
  auto* rk = cmd->add_option("--range-km", args.range_km_text,
                             "per-layer communication ranges in km");
  rm->excludes(rk);
  rk->excludes(rm);
  cmd->callback([&args] {
    if (args.range_m_text.empty() && args.range_km_text.empty())
      throw CLI::RequiredError("--range-m or --range-km");
  });
}

MissionSpec mission_from_flags(const std::string& preset, const std::string& file) {
  if (!preset.empty() && !file.empty())
    throw std::invalid_argument("give either --preset or --mission, not both");
  if (!preset.empty()) {
    auto ms = find_preset(preset);
    if (!ms) {
      std::string names;
      for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
      throw std::invalid_argument("unknown preset '" + preset + "' (available: " + names + ")");
    }
    return *ms;
  }
  if (!file.empty()) return load_mission(file);
  throw std::invalid_argument("a mission is required: --preset <name> or --mission <file>");
}

std::string flag(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------- degree --

struct DegreeOpts {
  DesignArgs design;
  std::string strand_text;
  bool empirical = false;
  bool dump_geometry = false;
  double window_km = 20.0;
  std::uint64_t seed = 1;
  std::string out = ".";
};

int cmd_degree(const DegreeOpts& opt) {
  const auto lam = opt.design.lambdas();
  const auto r = opt.design.ranges_km();
  opt.design.check(lam, r);
  const StrandId strand = opt.strand_text.empty()
                              ? (lam.size() == 1 ? StrandId::intra(1) : StrandId::combined())
                              : StrandId::parse(opt.strand_text);
  strand.validate(static_cast<int>(lam.size()));

  fs::create_directories(opt.out);
  Manifest manifest("degree", opt.out);
  manifest.params() = {{"lambda", lam},          {"range_km", r},
                       {"strand", strand.label()}, {"empirical", opt.empirical},
                       {"dump_geometry", opt.dump_geometry},
                       {"window_km", opt.window_km}, {"seed", opt.seed},
                       {"out", opt.out}};

  const PoissonMixture model = strand_model(lam, r, strand);

  {
    csv::Writer w(manifest.target("degree_pmf.csv"), {"strand", "k", "probability"});
    for (int k = 0; k <= model.k_max(); ++k)
      w.row({strand.label(), csv::fmt(k), csv::fmt(model.pmf(k))});
  }

  std::string tv_field;
  if (opt.empirical) {
    const Window window{opt.window_km, opt.window_km, true};
    const auto layers = sample_layers(lam, window, opt.seed);
    const auto graph = MultiLayerGraph::build(layers, r, window);
    if (opt.dump_geometry) {
      write_points_csv(layers, manifest.target("points.csv"));
      write_edges_csv(graph, manifest.target("edges.csv"));
    }
    const auto hist = graph.degree_histogram(strand);
    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    csv::Writer w(manifest.target("degree_empirical.csv"),
                  {"strand", "k", "count", "frequency"});
    for (std::size_t k = 0; k < hist.size(); ++k)
      w.row({strand.label(), csv::fmt(static_cast<long long>(k)), csv::fmt(hist[k]),
             csv::fmt(total ? static_cast<double>(hist[k]) / total : 0.0)});
    tv_field = csv::fmt(total_variation(hist, model));
  }

  {
    csv::Writer w(manifest.target("degree_summary.csv"),
                  {"strand", "mean", "second_moment", "alpha_c", "tv_distance"});
    const std::string alpha_c =
        model.mean() > 0.0 ? csv::fmt(epidemic_threshold(model)) : std::string();
    w.row({strand.label(), csv::fmt(model.mean()), csv::fmt(model.second_moment()), alpha_c,
           tv_field});
  }

  manifest.write();
  return 0;
}

// ----------------------------------------------------------- equilibrium --

struct EquilibriumOpts {
  DesignArgs design;
  bool has_design = false;
  double gamma = 1.0;
  double delta = 0.0;
  bool fig10 = false;
  std::string out = ".";
};

int cmd_equilibrium(const EquilibriumOpts& opt) {
  fs::create_directories(opt.out);
  Manifest manifest("equilibrium", opt.out);
  manifest.params() = {{"gamma", opt.gamma}, {"delta", opt.delta}, {"fig10", opt.fig10},
                       {"out", opt.out}};
  const double alpha = effective_rate(opt.gamma, opt.delta);

  if (opt.has_design) {
    const auto lam = opt.design.lambdas();
    const auto r = opt.design.ranges_km();
    opt.design.check(lam, r);
    manifest.params()["lambda"] = lam;
    manifest.params()["range_km"] = r;

    csv::Writer w(manifest.target("equilibrium.csv"),
                  {"strand", "alpha", "theta_exact", "theta_approx", "avg_informed"});
    for (const auto& rep : evaluate_strands(lam, r, alpha))
      w.row({rep.strand.label(), csv::fmt(alpha), csv::fmt(rep.theta_exact),
             csv::fmt(rep.theta_lower_bound), csv::fmt(rep.avg_informed)});
  } else if (!opt.fig10) {
    throw std::invalid_argument("equilibrium needs a design (--lambda/--range-*) or --fig10");
  }

  if (opt.fig10) {
    // Accuracy study of the closed-form bound: r = 0.2 km,
    // lambda in {25, 50, 100} km^-2, alpha swept over [0.05, 1].
    csv::Writer w(manifest.target("fig10.csv"),
                  {"lambda", "ek", "alpha", "theta_exact", "theta_approx", "gap"});
    for (double lam : {25.0, 50.0, 100.0}) {
      const PoissonMixture model = intra_model(lam, 0.2);
      const DegreeSpectrum spectrum = DegreeSpectrum::of(model);
      for (int i = 1; i <= 20; ++i) {
        const double a = 0.05 * i;
        const double exact = solve_theta_exact(spectrum, a).theta;
        const double approx = theta_approx(spectrum, a);
        w.row({csv::fmt(lam), csv::fmt(model.mean()), csv::fmt(a), csv::fmt(exact),
               csv::fmt(approx), csv::fmt(exact - approx)});
      }
    }
  }

  manifest.write();
  return 0;
}

// -------------------------------------------------------- optimize/sweep --

std::vector<std::string> design_header(int m_layers) {
  std::vector<std::string> h = {"delta", "alpha"};
  for (int i = 1; i <= m_layers; ++i) h.push_back("lambda_" + std::to_string(i));
  for (int i = 1; i <= m_layers; ++i) h.push_back("r_" + std::to_string(i) + "_km");
  h.insert(h.end(), {"cost", "feasible", "iterations"});
  return h;
}

std::vector<std::string> design_row(double delta, double alpha, int m_layers,
                                    const OptimizationResult& res) {
  std::vector<std::string> row = {csv::fmt(delta), csv::fmt(alpha)};
  if (res.feasible) {
    for (int i = 0; i < m_layers; ++i) row.push_back(csv::fmt(res.design.density[i]));
    for (int i = 0; i < m_layers; ++i) row.push_back(csv::fmt(res.design.range_km[i]));
    row.push_back(csv::fmt(res.cost));
  } else {
    row.insert(row.end(), 2 * m_layers + 1, "");  // no design to report
  }
  row.push_back(flag(res.feasible));
  row.push_back(csv::fmt(res.iterations));
  return row;
}

struct OptimizeOpts {
  std::string preset;
  std::string mission_file;
  std::optional<double> delta;
  bool verify = false;
  std::string out = ".";
};

int cmd_optimize(const OptimizeOpts& opt) {
  MissionSpec mission = mission_from_flags(opt.preset, opt.mission_file);
  if (opt.delta) mission.delta = *opt.delta;
  mission.validate();

  fs::create_directories(opt.out);
  Manifest manifest("optimize", opt.out);
  manifest.params() = {{"preset", opt.preset},   {"mission", opt.mission_file},
                       {"delta", mission.delta}, {"verify", opt.verify},
                       {"out", opt.out},         {"mission_name", mission.name}};

  OptimizationResult result;
  try {
    result = optimize(mission);
  } catch (const InfeasibleError& err) {
    result.feasible = false;
    result.start_failures.push_back({{}, err.violated});
  }

  const int m_layers = mission.layer_count();
  {
    csv::Writer w(manifest.target("optimize_result.csv"), design_header(m_layers));
    w.row(design_row(mission.delta, mission.alpha(), m_layers, result));
  }
  {
    csv::Writer w(manifest.target("optimize_trace.csv"), {"iteration", "cost"});
    for (std::size_t i = 0; i < result.cost_trace.size(); ++i)
      w.row({csv::fmt(static_cast<long long>(i + 1)), csv::fmt(result.cost_trace[i])});
  }
  if (opt.verify && result.feasible) {
    csv::Writer w(manifest.target("optimize_verify.csv"),
                  {"strand", "threshold", "theta", "avg_informed", "pass"});
    for (const auto& row : verify_original(result.design, mission, mission.thresholds))
      w.row({row.strand.label(), csv::fmt(row.threshold), csv::fmt(row.theta),
             csv::fmt(row.avg_informed), flag(row.pass)});
  }

  manifest.write();
  if (!result.feasible) {
    std::cerr << "infeasible for every start";
    for (const auto& f : result.start_failures)
      for (const auto& v : f.violated) std::cerr << " " << v;
    std::cerr << "\n";
    return 3;
  }
  return 0;
}

struct SweepOpts {
  std::string preset;
  std::string mission_file;
  std::string delta_text = "0:0.8:0.1";
  int jobs = 1;
  std::string out = ".";
};

int cmd_sweep(const SweepOpts& opt) {
  MissionSpec mission = mission_from_flags(opt.preset, opt.mission_file);
  std::vector<double> grid = parse_delta_grid(opt.delta_text);
  std::sort(grid.begin(), grid.end());  // rows are reported in threat order
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  fs::create_directories(opt.out);
  Manifest manifest("sweep", opt.out);
  manifest.params() = {{"preset", opt.preset}, {"mission", opt.mission_file},
                       {"delta", grid},        {"jobs", opt.jobs},
                       {"out", opt.out},       {"mission_name", mission.name}};

  const auto rows = sweep_threat(mission, grid, opt.jobs);
  const int m_layers = mission.layer_count();
  bool any_feasible = false;
  {
    csv::Writer w(manifest.target("sweep.csv"), design_header(m_layers));
    for (const auto& row : rows) {
      any_feasible = any_feasible || row.result.feasible;
      w.row(design_row(row.delta, row.alpha, m_layers, row.result));
    }
  }

  manifest.write();
  if (!any_feasible) {
    std::cerr << "every sweep row is infeasible\n";
    return 3;
  }
  return 0;
}

// -------------------------------------------------------------- simulate --

struct SimulateOpts {
  DesignArgs design;
  std::string strand_text = "combined";
  double gamma = 1.0;
  double delta = 0.0;
  double window_km = 10.0;
  bool no_wrap = false;
  bool dump_geometry = false;
  SimConfig config;
  std::string out = ".";
};

int cmd_simulate(const SimulateOpts& opt) {
  const auto lam = opt.design.lambdas();
  const auto r = opt.design.ranges_km();
  opt.design.check(lam, r);
  const StrandId strand = StrandId::parse(opt.strand_text);
  strand.validate(static_cast<int>(lam.size()));
  const double alpha = effective_rate(opt.gamma, opt.delta);
  opt.config.validate();

  fs::create_directories(opt.out);
  Manifest manifest("simulate", opt.out);
  manifest.params() = {{"lambda", lam},
                       {"range_km", r},
                       {"strand", strand.label()},
                       {"gamma", opt.gamma},
                       {"delta", opt.delta},
                       {"window_km", opt.window_km},
                       {"wraparound", !opt.no_wrap},
                       {"dump_geometry", opt.dump_geometry},
                       {"slots", opt.config.slots},
                       {"burn_in", opt.config.burn_in},
                       {"trials", opt.config.trials},
                       {"dt", opt.config.dt},
                       {"initial_informed", opt.config.initial_informed},
                       {"seed", opt.config.seed},
                       {"out", opt.out}};

  const Window window{opt.window_km, opt.window_km, !opt.no_wrap};
  const auto layers = sample_layers(lam, window, opt.config.seed);
  const auto graph = MultiLayerGraph::build(layers, r, window);
  if (opt.dump_geometry) {
    write_points_csv(layers, manifest.target("points.csv"));
    write_edges_csv(graph, manifest.target("edges.csv"));
  }

  const SimResult result = run_sis(graph, strand, alpha, opt.config);
  const SteadyEstimate estimate = estimate_steady_state(result);

  const PoissonMixture model = strand_model(lam, r, strand);
  const EquilibriumResult eq = solve_theta_exact(model, alpha);

  {
    csv::Writer w(manifest.target("simulate_trajectory.csv"), {"slot", "informed_fraction"});
    const auto mean = result.mean_trajectory();
    for (std::size_t s = 0; s < mean.size(); ++s)
      w.row({csv::fmt(static_cast<long long>(s)), csv::fmt(mean[s])});
  }
  {
    csv::Writer w(manifest.target("simulate_summary.csv"),
                  {"strand", "alpha", "mc_mean", "mc_stderr", "trials", "restarts",
                   "meanfield_avg_informed"});
    w.row({strand.label(), csv::fmt(alpha), csv::fmt(estimate.mean),
           csv::fmt(estimate.std_error), csv::fmt(result.config.trials),
           csv::fmt(result.restarts), csv::fmt(eq.average_informed)});
  }

  manifest.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"information-spread modelling and deployment planning for "
               "multi-layer device-to-device networks"};
  app.set_version_flag("--version", std::string("spreadnet ") + kVersion);
  app.require_subcommand(1);

  DegreeOpts degree;
  auto* cmd_deg = app.add_subcommand("degree", "analytic degree pmf of a strand, "
                                               "optionally against a sampled network");
  add_design_flags(cmd_deg, degree.design);
  cmd_deg->add_option("--strand", degree.strand_text, "intra:M, inter:M,N or combined");
  cmd_deg->add_flag("--empirical", degree.empirical, "also sample a torus and compare");
  cmd_deg->add_flag("--dump-geometry", degree.dump_geometry,
                    "with --empirical, write the sampled points and edge list");
  cmd_deg->add_option("--window-km", degree.window_km, "square window side for --empirical")
      ->check(CLI::PositiveNumber);
  cmd_deg->add_option("--seed", degree.seed, "RNG seed");
  cmd_deg->add_option("--out", degree.out, "output directory");

  EquilibriumOpts equilibrium;
  auto* cmd_eq = app.add_subcommand("equilibrium", "stationary informed densities per strand");
  cmd_eq->add_option("--lambda", equilibrium.design.lambda_text,
                     "per-layer deployment densities, km^-2");
  auto* eq_rm = cmd_eq->add_option("--range-m", equilibrium.design.range_m_text,
                                   "per-layer ranges in meters");
  auto* eq_rk = cmd_eq->add_option("--range-km", equilibrium.design.range_km_text,
                                   "per-layer ranges in km");
  eq_rm->excludes(eq_rk);
  eq_rk->excludes(eq_rm);
  cmd_eq->add_option("--gamma", equilibrium.gamma, "contact rate")->check(CLI::PositiveNumber);
  cmd_eq->add_option("--delta", equilibrium.delta, "threat level")
      ->check(CLI::Range(0.0, 1.0));
  cmd_eq->add_flag("--fig10", equilibrium.fig10,
                   "emit the bound-accuracy sweep (r=0.2 km, lambda 25/50/100)");
  cmd_eq->add_option("--out", equilibrium.out, "output directory");

  OptimizeOpts optimize_opts;
  auto* cmd_opt = app.add_subcommand("optimize", "minimum-cost design for a mission");
  cmd_opt->add_option("--preset", optimize_opts.preset, "mission preset name");
  cmd_opt->add_option("--mission", optimize_opts.mission_file, "mission JSON file");
  double optimize_delta = -1.0;
  auto* opt_delta = cmd_opt->add_option("--delta", optimize_delta, "threat level override")
                        ->check(CLI::Range(0.0, 1.0));
  cmd_opt->add_flag("--verify", optimize_opts.verify,
                    "post-hoc check of the original thresholds");
  cmd_opt->add_option("--out", optimize_opts.out, "output directory");

  SweepOpts sweep;
  auto* cmd_sw = app.add_subcommand("sweep", "optimize across a threat-level grid");
  cmd_sw->add_option("--preset", sweep.preset, "mission preset name");
  cmd_sw->add_option("--mission", sweep.mission_file, "mission JSON file");
  cmd_sw->add_option("--delta", sweep.delta_text, "grid start:end:step or comma list");
  cmd_sw->add_option("--jobs", sweep.jobs, "parallel rows")->check(CLI::PositiveNumber);
  cmd_sw->add_option("--out", sweep.out, "output directory");

  SimulateOpts simulate;
  auto* cmd_sim = app.add_subcommand("simulate", "slotted SIS broadcast on a sampled network");
  add_design_flags(cmd_sim, simulate.design);
  cmd_sim->add_option("--strand", simulate.strand_text, "intra:M, inter:M,N or combined");
  cmd_sim->add_option("--gamma", simulate.gamma, "contact rate")->check(CLI::PositiveNumber);
  cmd_sim->add_option("--delta", simulate.delta, "threat level")->check(CLI::Range(0.0, 1.0));
  cmd_sim->add_option("--window-km", simulate.window_km, "square window side")
      ->check(CLI::PositiveNumber);
  cmd_sim->add_flag("--no-wrap", simulate.no_wrap, "plain boundaries instead of a torus");
  cmd_sim->add_flag("--dump-geometry", simulate.dump_geometry,
                    "write the sampled points and edge list");
  cmd_sim->add_option("--slots", simulate.config.slots, "simulated slots");
  cmd_sim->add_option("--burn-in", simulate.config.burn_in, "slots discarded before averaging");
  cmd_sim->add_option("--trials", simulate.config.trials, "independent trials");
  cmd_sim->add_option("--dt", simulate.config.dt, "micro-slot fraction");
  cmd_sim->add_option("--init-frac", simulate.config.initial_informed,
                      "initially informed fraction");
  cmd_sim->add_option("--seed", simulate.config.seed, "RNG seed");
  cmd_sim->add_option("--out", simulate.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // 2 on usage errors, 0 for --help/--version
  }

  try {
    if (app.got_subcommand(cmd_deg)) return cmd_degree(degree);
    if (app.got_subcommand(cmd_eq)) {
      equilibrium.has_design = !equilibrium.design.lambda_text.empty();
      return cmd_equilibrium(equilibrium);
    }
    if (app.got_subcommand(cmd_opt)) {
      if (opt_delta->count() > 0) optimize_opts.delta = optimize_delta;
      return cmd_optimize(optimize_opts);
    }
    if (app.got_subcommand(cmd_sw)) return cmd_sweep(sweep);
    if (app.got_subcommand(cmd_sim)) return cmd_simulate(simulate);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
