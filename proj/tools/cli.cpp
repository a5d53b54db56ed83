#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hmcp/coupling.hpp"
#include "hmcp/dual.hpp"
#include "hmcp/engine.hpp"
#include "hmcp/event_log.hpp"
#include "hmcp/experiments.hpp"
#include "hmcp/io.hpp"
#include "hmcp/meanfield.hpp"
#include "hmcp/rng.hpp"

namespace hmcp::cli {

namespace {

namespace fs = std::filesystem;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string stringify(double v) { return format_double(v); }
std::string stringify(int v) { return std::to_string(v); }
std::string stringify(unsigned v) { return std::to_string(v); }
std::string stringify(std::uint64_t v) { return std::to_string(v); }
std::string stringify(bool v) { return v ? "true" : "false"; }
std::string stringify(const std::string& v) { return v; }

struct Options {
  double alpha = 3.0;
  double beta = 2.0;
  std::string a = "5";
  std::string b = "2";
  int d = 2;
  int L = 10;
  int R = 1;
  int extent = 200;
  double t_end = 100.0;
  std::uint64_t seed = 1;
  int replicates = 8;
  std::string out_dir = ".";
  std::string snapshot_times;
  double density1 = 0.25;
  double density2 = 0.25;
  double density3 = 0.25;
  std::string alpha_grid = "1:6:0.25";
  double threshold = 0.02;
  double t_from = 50.0;
  std::string coexist_types;
  double sample_dt = 1.0;
  double h = 0.01;
  double v11 = 0.2;
  double v22 = 0.2;
  double v13 = 0.05;
  double v23 = 0.05;
  int grid_n = 50;
  double grid_max = 6.0;
  std::string mode = "hetero_vs_homo";
  unsigned workers = 0;
  bool full_grid = false;
  int block_n = 4;
  int sub_side = 0;
  std::string config;
};

/// A subcommand together with the options it records in its manifest.
struct Command {
  CLI::App* app = nullptr;
  Options o;
  std::vector<std::pair<std::string, std::function<std::string()>>> recorded;
  std::function<int(Command&, std::ostream&)> run;

  template <typename T>
  void add(const std::string& name, T& ref, const std::string& help) {
    app->add_option("--" + name, ref, help)
        ->capture_default_str()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    recorded.emplace_back(name, [&ref] { return stringify(ref); });
  }
  void flag(const std::string& name, bool& ref, const std::string& help) {
    app->add_flag("--" + name, ref, help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    recorded.emplace_back(name, [&ref] { return stringify(ref); });
  }

  void add_geometry() {
    add("d", o.d, "lattice dimension");
    add("L", o.L, "habitat scale; tiles have side 2L");
    add("R", o.R, "dispersal range (sup-norm radius)");
    add("extent", o.extent, "torus side length, a multiple of 4L");
  }
  void add_rates() {
    add("alpha", o.alpha, "specialist birth rate");
    add("beta", o.beta, "generalist birth rate");
  }
  void add_init() {
    add("init-density1", o.density1, "initial density of specialist 1 (before habitat remap)");
    add("init-density2", o.density2, "initial density of specialist 2 (before habitat remap)");
    add("init-density3", o.density3, "initial density of generalists");
  }
  void add_run() {
    add("t-end", o.t_end, "simulated time");
    add("seed", o.seed, "master seed");
    add("out-dir", o.out_dir, "directory for output files");
  }
  void add_workers() { add("workers", o.workers, "worker threads (0 = all cores)"); }

  HabitatSpec spec() const {
    HabitatSpec s{o.d, o.L, o.R, o.extent};
    validate_geometry(s);
    return s;
  }
  ProductDensities init() const { return {o.density1, o.density2, o.density3}; }

  RunManifest manifest(std::vector<std::string> outputs) const {
    RunManifest m;
    m.subcommand = app->get_name();
    for (const auto& [name, value] : recorded)
      if (name != "out-dir" && name != "seed") m.params.emplace_back(name, value());
    m.seed = o.seed;
    m.version = kVersion;
    m.outputs = std::move(outputs);
    return m;
  }
};

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    double v = 0.0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || end != item.data() + item.size())
      throw ValidationError("invalid number '" + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

/// "start:stop:step" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text, "--alpha-grid");
  std::string fields = text;
  std::replace(fields.begin(), fields.end(), ':', ',');
  const auto v = parse_list(fields, "--alpha-grid");
  if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0])
    throw ValidationError("--alpha-grid range must be start:stop:step with step > 0 and stop >= start");
  std::vector<double> out;
  const auto count = static_cast<std::int64_t>(std::floor((v[1] - v[0]) / v[2] + 1e-9));
  for (std::int64_t k = 0; k <= count; ++k) out.push_back(v[0] + static_cast<double>(k) * v[2]);
  return out;
}

std::vector<State> parse_types(const std::string& text) {
  std::vector<State> out;
  for (double v : parse_list(text, "--coexist-types")) {
    if (v != 1.0 && v != 2.0 && v != 3.0) throw ValidationError("--coexist-types takes values among 1,2,3");
    out.push_back(state_from_int(static_cast<int>(v)));
  }
  return out;
}

/// Exact rational for a decimal or p/q literal; nullopt if it does not fit.
std::optional<meanfield::Rational> parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto whole = [](const std::string& s, std::int64_t& v) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && end == s.data() + s.size() && !s.empty();
  };
  std::int64_t num = 0;
  std::int64_t den = 1;
  if (slash != std::string::npos) {
    if (!whole(text.substr(0, slash), num) || !whole(text.substr(slash + 1), den) || den == 0) return std::nullopt;
    return meanfield::Rational{num, den};
  }
  const auto dot = text.find('.');
  std::string digits = text;
  if (dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    if (frac.size() > 17) return std::nullopt;
    digits = text.substr(0, dot) + frac;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  }
  if (digits == "-" || digits.empty() || !whole(digits, num)) return std::nullopt;
  return meanfield::Rational{num, den};
}

double parse_number(const std::string& text, const std::string& flag) {
  if (auto r = parse_rational(text)) return static_cast<double>(r->num) / static_cast<double>(r->den);
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ValidationError("invalid number '" + text + "' for --" + flag);
  return v;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& path) : root_(path) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + path + ": " + ec.message());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(root_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + (root_ / name).string() + " for writing");
    return f;
  }

  /// Writes manifest.txt; returns the digest to stamp on outputs.
  std::string write_manifest(const RunManifest& m) const {
    auto f = open("manifest.txt");
    const std::string digest = m.digest();
    f << m.text() << "digest = " << digest << '\n';
    if (!f) throw std::runtime_error("failed writing manifest.txt");
    return digest;
  }

 private:
  fs::path root_;
};

std::string snapshot_name(const std::string& stem, double t, const std::string& ext) {
  return stem + "_t" + format_double(t) + ext;
}

void print_densities(std::ostream& out, const Counts& counts) {
  const auto rho = densities(counts);
  out << "rho0=" << format_double(rho[0]) << " rho1=" << format_double(rho[1]) << " rho2=" << format_double(rho[2])
      << " rho3=" << format_double(rho[3]) << '\n';
}

int run_simulate(Command& c, std::ostream& out) {
  const Options& o = c.o;
  const HabitatSpec spec = c.spec();
  const Params params{o.alpha, o.beta};
  params.validate();
  SamplingPlan plan{o.sample_dt, parse_list(o.snapshot_times, "--snapshot-times")};
  const auto types = parse_types(o.coexist_types);
  if (!types.empty() && !(o.threshold > 0.0 && o.threshold < 1.0))
    throw ValidationError("--threshold must lie in (0, 1)");

  std::vector<std::string> outputs{"trajectory.csv"};
  for (double t : plan.snapshot_times) outputs.push_back(snapshot_name("snapshot", t, ".txt"));
  outputs.push_back("snapshot_final.txt");
  outputs.push_back("boundary_profile.csv");
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest(outputs));

  auto lattice = std::make_shared<const Lattice>(spec);
  Configuration init = init_config(lattice, c.init(), derive_seed(o.seed, {0}));
  plan.snapshot_times.push_back(o.t_end);
  Trajectory traj = run_direct(std::move(init), params, o.t_end, derive_seed(o.seed, {1}), plan);
  const Snapshot final_state = traj.snapshots.back();
  traj.snapshots.pop_back();

  {
    auto f = dir.open("trajectory.csv");
    write_trajectory_csv(f, traj, digest);
  }
  for (const auto& snap : traj.snapshots) {
    auto f = dir.open(snapshot_name("snapshot", snap.t, ".txt"));
    write_snapshot(f, snap.config, snap.t, o.seed, digest);
  }
  {
    auto f = dir.open("snapshot_final.txt");
    write_snapshot(f, final_state.config, final_state.t, o.seed, digest);
  }
  {
    auto f = dir.open("boundary_profile.csv");
    write_boundary_profile(f, boundary_profile(final_state.config), digest);
  }

  out << "events=" << traj.events << '\n';
  print_densities(out, traj.samples.back().counts);
  if (!types.empty()) {
    const bool ok = coexistence_check(traj, types, o.threshold, o.t_from);
    out << "coexistence=" << (ok ? "yes" : "no") << '\n';
  }
  return kOk;
}

int run_meanfield(Command& c, std::ostream& out) {
  const Options& o = c.o;
  const meanfield::Params p{parse_number(o.a, "a"), parse_number(o.b, "b")};
  p.validate();
  const meanfield::State s0{o.v11, o.v22, o.v13, o.v23};
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest({"meanfield.csv"}));
  const auto samples = meanfield::integrate(s0, p, o.t_end, o.h, o.sample_dt);
  auto f = dir.open("meanfield.csv");
  write_meanfield_csv(f, samples, digest);
  const auto& s = samples.back().state;
  out << "t=" << format_double(samples.back().t) << " v11=" << format_double(s.v11) << " v22=" << format_double(s.v22)
      << " v13=" << format_double(s.v13) << " v23=" << format_double(s.v23) << '\n';
  return kOk;
}

int run_equilibria(Command& c, std::ostream& out) {
  const Options& o = c.o;
  const meanfield::Params p{parse_number(o.a, "a"), parse_number(o.b, "b")};
  p.validate();
  if (o.grid_n < 1) throw ValidationError("--grid-n must be >= 1");
  if (!(o.grid_max > 0.0) || !std::isfinite(o.grid_max)) throw ValidationError("--grid-max must be positive");
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest({"equilibria.csv", "regime_grid.csv"}));

  const auto eqs = meanfield::equilibria(p);
  {
    auto f = dir.open("equilibria.csv");
    write_equilibria_csv(f, p, eqs, digest);
  }
  std::vector<RegimeCell> cells;
  for (int i = 1; i <= o.grid_n; ++i)
    for (int j = 1; j <= o.grid_n; ++j) {
      const double a = o.grid_max * i / o.grid_n;
      const double b = o.grid_max * j / o.grid_n;
      cells.push_back({a, b, meanfield::classify_regime({a, b})});
    }
  {
    auto f = dir.open("regime_grid.csv");
    write_regime_grid_csv(f, cells, digest);
  }

  const auto ra = parse_rational(o.a);
  const auto rb = parse_rational(o.b);
  const auto regime = ra && rb ? meanfield::classify_regime(*ra, *rb) : meanfield::classify_regime(p);
  out << "regime=" << meanfield::to_string(regime) << '\n';
  for (const auto& e : eqs)
    out << meanfield::to_string(e.kind) << ' ' << meanfield::to_string(e.stability) << " leading_rate="
        << format_double(e.leading_rate) << '\n';
  return kOk;
}

int run_sweep(Command& c, std::ostream& out) {
  const Options& o = c.o;
  CriticalAlphaOptions opt;
  opt.beta = o.beta;
  opt.spec = c.spec();
  opt.alpha_grid = parse_grid(o.alpha_grid);
  opt.t_end = o.t_end;
  opt.replicates = o.replicates;
  opt.seed = o.seed;
  opt.init = c.init();
  opt.stop_at_threshold = !o.full_grid;
  opt.workers = o.workers;
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest({"sweep.csv"}));
  const auto result = critical_alpha(opt);
  auto f = dir.open("sweep.csv");
  write_sweep_csv(f, result, digest);
  out << "alpha_hat=" << (result.alpha_hat ? format_double(*result.alpha_hat) : std::string("not_found")) << '\n';
  return kOk;
}

int run_couple(Command& c, std::ostream& out) {
  Options& o = c.o;
  const CouplingMode mode = coupling_mode_from_string(o.mode);
  const HabitatSpec spec = c.spec();
  const Params params{o.alpha, o.beta};
  params.validate();
  if (o.replicates < 1) throw ValidationError("--replicates must be >= 1");
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest({"couple.csv"}));

  auto lattice = std::make_shared<const Lattice>(spec);
  const ProductDensities init = c.init();
  if (mode == CouplingMode::specialists_vs_replacement && init.density3 > 0.0)
    throw ValidationError("specialists_vs_replacement needs --init-density3 0");
  std::vector<CoupledRun> runs(static_cast<std::size_t>(o.replicates));
  parallel_for(runs.size(), o.workers, [&](std::size_t i) {
    const Configuration first = init_config(lattice, init, derive_seed(o.seed, {i, 0}));
    const Configuration second = paired_initial(mode, first);
    runs[i] = run_coupled(mode, first, second, params, o.t_end, derive_seed(o.seed, {i, 1}), {o.sample_dt, {}});
  });

  std::size_t violations = 0;
  auto f = dir.open("couple.csv");
  f << "# manifest " << digest << '\n';
  f << "trial,events,violations,first_rho1,first_rho2,first_rho3,second_rho1,second_rho2,second_rho3\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const auto a = densities(r.first.samples.back().counts);
    const auto b = densities(r.second.samples.back().counts);
    f << i << ',' << r.first.events << ',' << r.violations.size();
    for (int k = 1; k <= 3; ++k) f << ',' << format_double(a[static_cast<std::size_t>(k)]);
    for (int k = 1; k <= 3; ++k) f << ',' << format_double(b[static_cast<std::size_t>(k)]);
    f << '\n';
    violations += r.violations.size();
  }
  out << "mode=" << to_string(mode) << " trials=" << runs.size() << " violations=" << violations << '\n';
  return violations == 0 ? kOk : kRuntimeError;
}

int run_dual_check(Command& c, std::ostream& out) {
  const Options& o = c.o;
  const HabitatSpec spec = c.spec();
  const Params params{o.alpha, o.beta};
  params.validate();
  if (o.alpha < o.beta) throw ValidationError("dual-check needs --alpha >= --beta");
  if (o.replicates < 1) throw ValidationError("--replicates must be >= 1");
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest({"dual_check.csv", "dual_edges.csv"}));

  auto lattice = std::make_shared<const Lattice>(spec);
  const ProductDensities init = c.init();
  std::vector<std::int64_t> agreeing(static_cast<std::size_t>(o.replicates), 0);
  std::vector<DualEdge> edges;
  parallel_for(agreeing.size(), o.workers, [&](std::size_t i) {
    const Configuration xi0 = init_config(lattice, init, derive_seed(o.seed, {i, 0}));
    const EventLog log = EventLog::generate(lattice, params, o.t_end, derive_seed(o.seed, {i, 1}));
    const Configuration forward = evolve_by_events(xi0, log);
    std::int64_t ok = 0;
    for (SiteIndex x = 0; x < lattice->size(); ++x)
      if (reconstruct_type(x, o.t_end, log, xi0) == forward.at(x)) ++ok;
    agreeing[i] = ok;
    if (i == 0) edges = dual_tree_edges(0, o.t_end, log);
  });

  std::size_t exact = 0;
  {
    auto f = dir.open("dual_check.csv");
    f << "# manifest " << digest << '\n';
    f << "instance,sites,agreeing_sites,exact\n";
    for (std::size_t i = 0; i < agreeing.size(); ++i) {
      const bool all = agreeing[i] == lattice->size();
      exact += all ? 1 : 0;
      f << i << ',' << lattice->size() << ',' << agreeing[i] << ',' << (all ? 1 : 0) << '\n';
    }
  }
  {
    auto f = dir.open("dual_edges.csv");
    write_dual_edges(f, edges, digest);
  }
  out << exact << '/' << agreeing.size() << " exact agreements\n";
  return exact == agreeing.size() ? kOk : kRuntimeError;
}

int run_blocks(Command& c, std::ostream& out) {
  const Options& o = c.o;
  const HabitatSpec spec = c.spec();
  if (spec.d != 2) throw ValidationError("blocks needs --d 2");
  const Params params{o.alpha, o.beta};
  params.validate();
  const BlockSpec bs{o.block_n, o.sub_side};
  if (bs.n < 1) throw ValidationError("--block-n must be >= 1");
  if (bs.sub_side < 0) throw ValidationError("--sub-side must be >= 0");
  auto times = parse_list(o.snapshot_times, "--snapshot-times");
  if (times.empty()) times.push_back(o.t_end);
  for (double t : times)
    if (t < 0.0 || t > o.t_end) throw ValidationError("snapshot time outside [0, t-end]");

  std::vector<std::string> outputs;
  for (double t : times) {
    outputs.push_back(snapshot_name("blocks", t, ".txt"));
    outputs.push_back(snapshot_name("boundary_profile", t, ".csv"));
  }
  const OutputDir dir(o.out_dir);
  const std::string digest = dir.write_manifest(c.manifest(outputs));

  auto lattice = std::make_shared<const Lattice>(spec);
  Configuration init = init_config(lattice, c.init(), derive_seed(o.seed, {0}));
  const Trajectory traj =
      run_direct(std::move(init), params, o.t_end, derive_seed(o.seed, {1}), {std::max(o.t_end, 1.0), times});
  for (const auto& snap : traj.snapshots) {
    const auto rows = block_map(snap.config, bs);
    {
      auto f = dir.open(snapshot_name("blocks", snap.t, ".txt"));
      write_block_map(f, rows, snap.t, digest);
    }
    {
      auto f = dir.open(snapshot_name("boundary_profile", snap.t, ".csv"));
      write_boundary_profile(f, boundary_profile(snap.config), digest);
    }
    std::int64_t s_good = 0;
    std::int64_t g_good = 0;
    for (const auto& r : rows) {
      s_good += std::count(r.begin(), r.end(), 'S');
      g_good += std::count(r.begin(), r.end(), 'G');
    }
    out << "t=" << format_double(snap.t) << " s_good=" << s_good << " g_good=" << g_good << '\n';
  }
  return kOk;
}

struct ConfigEntry {
  std::string key;
  std::string value;
};

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::vector<ConfigEntry> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    ConfigEntry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (e.key.empty() || e.key == "config")
      throw ValidationError(path + ":" + std::to_string(lineno) + ": invalid key '" + e.key + "'");
    out.push_back(std::move(e));
  }
  return out;
}

/// Flag names given on the command line, with their values; rejects a flag
/// repeated with a different value.
std::map<std::string, std::string> scan_flags(const std::vector<std::string>& args) {
  std::map<std::string, std::string> seen;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& tok = args[i];
    if (tok.rfind("--", 0) != 0 || tok.size() == 2) continue;
    std::string name = tok.substr(2);
    std::string value;
    if (const auto eq = name.find('='); eq != std::string::npos) {
      value = name.substr(eq + 1);
      name.erase(eq);
    } else if (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      value = args[i + 1];
    }
    auto [it, fresh] = seen.emplace(name, value);
    if (!fresh && it->second != value)
      throw ValidationError("conflicting values for --" + name + ": '" + it->second + "' and '" + value + "'");
  }
  return seen;
}

void build(CLI::App& app, std::vector<std::unique_ptr<Command>>& commands) {
  auto make = [&](const std::string& name, const std::string& help, auto run) -> Command& {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, help);
    cmd->run = run;
    cmd->app->add_option("--config", cmd->o.config, "file of 'key = value' lines; command-line flags win");
    commands.push_back(std::move(cmd));
    return *commands.back();
  };

  {
    auto& c = make("simulate", "run the particle system and write trajectory and snapshots", run_simulate);
    c.add_rates();
    c.add_geometry();
    c.add_init();
    c.add_run();
    c.add("snapshot-times", c.o.snapshot_times, "comma-separated snapshot times");
    c.add("sample-dt", c.o.sample_dt, "interval between trajectory samples");
    c.add("coexist-types", c.o.coexist_types, "comma-separated types to test for coexistence");
    c.add("threshold", c.o.threshold, "coexistence density threshold");
    c.add("t-from", c.o.t_from, "coexistence window start");
  }
  {
    auto& c = make("meanfield", "integrate the mean-field equations", run_meanfield);
    c.o.t_end = 200.0;
    c.add("a", c.o.a, "specialist rate (decimal or p/q)");
    c.add("b", c.o.b, "generalist rate (decimal or p/q)");
    c.add("v11", c.o.v11, "initial v11");
    c.add("v22", c.o.v22, "initial v22");
    c.add("v13", c.o.v13, "initial v13");
    c.add("v23", c.o.v23, "initial v23");
    c.add("step", c.o.h, "integration step");
    c.add("sample-dt", c.o.sample_dt, "interval between output rows");
    c.o.sample_dt = 0.1;
    c.add_run();
  }
  {
    auto& c = make("equilibria", "list equilibria with stability and write the regime grid", run_equilibria);
    c.add("a", c.o.a, "specialist rate (decimal or p/q)");
    c.add("b", c.o.b, "generalist rate (decimal or p/q)");
    c.add("grid-n", c.o.grid_n, "regime grid points per axis");
    c.add("grid-max", c.o.grid_max, "regime grid covers (0, grid-max]^2");
    c.add("out-dir", c.o.out_dir, "directory for output files");
  }
  {
    auto& c = make("sweep-alpha", "estimate the smallest alpha at which specialists beat generalists", run_sweep);
    c.add("beta", c.o.beta, "generalist birth rate");
    c.add_geometry();
    c.add_init();
    c.add_run();
    c.add("alpha-grid", c.o.alpha_grid, "start:stop:step or comma list, ascending");
    c.add("replicates", c.o.replicates, "replicates per grid point");
    c.flag("full-grid", c.o.full_grid, "simulate every grid point instead of stopping at the threshold");
    c.add_workers();
  }
  {
    auto& c = make("couple", "run paired processes on shared marks and check the inclusions", run_couple);
    c.o.extent = 16;
    c.o.L = 2;
    c.o.t_end = 5.0;
    c.o.replicates = 200;
    c.add("mode", c.o.mode, "specialists_vs_replacement or hetero_vs_homo");
    c.add_rates();
    c.add_geometry();
    c.add_init();
    c.add_run();
    c.add("replicates", c.o.replicates, "number of trials");
    c.add("sample-dt", c.o.sample_dt, "interval between full comparisons");
    c.add_workers();
  }
  {
    auto& c = make("dual-check", "compare dual reconstruction with forward replay", run_dual_check);
    c.o.extent = 8;
    c.o.L = 2;
    c.o.alpha = 2.0;
    c.o.beta = 1.0;
    c.o.t_end = 3.0;
    c.o.replicates = 500;
    c.add_rates();
    c.add_geometry();
    c.add_init();
    c.add_run();
    c.add("replicates", c.o.replicates, "number of random instances");
    c.add_workers();
  }
  {
    auto& c = make("blocks", "write good-block maps and boundary profiles at snapshot times", run_blocks);
    c.o.L = 25;
    c.add_rates();
    c.add_geometry();
    c.add_init();
    c.add_run();
    c.add("snapshot-times", c.o.snapshot_times, "comma-separated times (default: t-end)");
    c.add("block-n", c.o.block_n, "inner box divisor n");
    c.add("sub-side", c.o.sub_side, "side of the small squares (0 = ceil(L^0.1))");
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Heterogeneous multitype contact process toolkit", "hmcp");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;
  build(app, commands);

  std::vector<std::string> argv = args;
  try {
    if (!argv.empty()) {
      auto it = std::find_if(commands.begin(), commands.end(),
                             [&](const auto& c) { return c->app->get_name() == argv.front(); });
      if (it != commands.end()) {
        const std::vector<std::string> rest(argv.begin() + 1, argv.end());
        const auto given = scan_flags(rest);
        if (auto cfg = given.find("config"); cfg != given.end()) {
          std::vector<std::string> extra;
          for (const auto& e : read_config(cfg->second))
            if (!given.count(e.key)) extra.push_back("--" + e.key + "=" + e.value);
          argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        }
      }
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    for (const auto& c : commands)
      if (c->app->parsed()) {
        if (e.get_exit_code() == 0) {
          out << c->app->help();
          return kOk;
        }
      }
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      return c->run(*c, out);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kValidationError;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kRuntimeError;
    }
  }
  err << "error: no subcommand\n";
  return kValidationError;
}

}  // namespace hmcp::cli
