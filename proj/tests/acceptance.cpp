#include <sys/resource.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hmcp/meanfield.hpp"

namespace fs = std::filesystem;
namespace mf = hmcp::meanfield;

namespace {

const fs::path kRoot = fs::current_path() / "acceptance_runs";

struct Invocation {
  std::string key;
  std::vector<std::string> args;
  int code = 0;
  std::string out;
};

std::vector<Invocation> history;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Invocation run_in(const fs::path& base, const std::string& key, const std::vector<std::string>& args) {
  Invocation inv{key, args, 0, {}};
  auto full = args;
  full.push_back("--out-dir");
  full.push_back((base / key).string());
  std::ostringstream out;
  std::ostringstream err;
  inv.code = hmcp::cli::run_command(full, out, err);
  inv.out = out.str();
  if (inv.code != 0) std::cerr << key << ": exit " << inv.code << ": " << err.str();
  return inv;
}

Invocation cli(const std::string& key, const std::vector<std::string>& args) {
  auto inv = run_in(kRoot / "first", key, args);
  history.push_back(inv);
  return inv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::optional<double> field(const std::string& text, const std::string& name) {
  const auto at = text.find(name + "=");
  if (at == std::string::npos) return std::nullopt;
  try {
    return std::stod(text.substr(at + name.size() + 1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string item; std::getline(s, item, sep);) out.push_back(item);
  return out;
}

std::string last_line(const std::string& text) {
  auto end = text.find_last_not_of('\n');
  auto start = text.rfind('\n', end);
  return text.substr(start + 1, end - start);
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void duality() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Setting {
    const char* alpha;
    const char* beta;
    const char* n;
  };
  const Setting settings[] = {{"2", "1", "167"}, {"2", "2", "167"}, {"3", "1", "166"}};
  long exact = 0;
  long total = 0;
  bool ok = true;
  for (int i = 0; i < 3; ++i) {
    const auto& s = settings[i];
    const auto inv = cli("c1_dual_" + std::to_string(i),
                         {"dual-check", "--extent", "8", "--L", "2", "--R", "1", "--t-end", "3", "--alpha", s.alpha,
                          "--beta", s.beta, "--replicates", s.n, "--seed", std::to_string(100 + i)});
    long k = 0;
    long n = 0;
    if (std::sscanf(inv.out.c_str(), "%ld/%ld", &k, &n) != 2) ok = false;
    exact += k;
    total += n;
  }
  const double secs = seconds_since(t0);
  report(1, ok && total == 500 && exact == total && secs <= 60.0,
         std::to_string(exact) + "/" + std::to_string(total) + " instances agree at every site, " + fmt(secs) + " s");
}

void coupling() {
  long violations = 0;
  long trials = 0;
  bool ok = true;
  for (const char* mode : {"specialists_vs_replacement", "hetero_vs_homo"}) {
    std::vector<std::string> args{"couple", "--mode", mode, "--extent", "16", "--L", "2", "--t-end", "5",
                                  "--replicates", "200", "--seed", "7"};
    if (std::string(mode) == "specialists_vs_replacement") {
      args.insert(args.end(), {"--init-density3", "0", "--init-density1", "0.3", "--init-density2", "0.3"});
    }
    const auto inv = cli(std::string("c2_") + mode, args);
    const auto v = field(inv.out, "violations");
    const auto n = field(inv.out, "trials");
    if (!v || !n) {
      ok = false;
      continue;
    }
    violations += static_cast<long>(*v);
    trials += static_cast<long>(*n);
  }
  report(2, ok && trials == 400 && violations == 0,
         std::to_string(violations) + " violations over " + std::to_string(trials) + " trials in two modes");
}

void meanfield_figure() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    const char* a;
    std::array<double, 4> target;
  };
  const Case cases[] = {{"5", {0.3, 0.3, 0.0, 0.0}}, {"3", {0.0, 0.0, 0.25, 0.25}}};
  double worst = 0.0;
  bool ok = true;
  for (const auto& c : cases) {
    const auto inv = cli(std::string("c3_meanfield_a") + c.a,
                         {"meanfield", "--a", c.a, "--b", "2", "--t-end", "200", "--v11", "0.2", "--v22", "0.2",
                          "--v13", "0.05", "--v23", "0.05"});
    const auto row = split(last_line(slurp(kRoot / "first" / (std::string("c3_meanfield_a") + c.a) / "meanfield.csv")),
                           ',');
    if (inv.code != 0 || row.size() < 5 || std::stod(row[0]) != 200.0) {
      ok = false;
      continue;
    }
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(std::stod(row[k + 1]) - c.target[k]));
  }
  const double secs = seconds_since(t0);
  report(3, ok && worst <= 1e-6 && secs <= 1.0,
         "max deviation at t=200 " + fmt(worst) + ", " + fmt(secs) + " s for both runs");
}

/// Regime from the inequality table for a = 3i/25, b = 3j/25.
std::string table_regime(int i, int j) {
  const bool a_below_2 = 3 * i < 50;
  const bool a_above_2 = 3 * i > 50;
  const bool b_below_1 = 3 * j < 25;
  const bool b_above_1 = 3 * j > 25;
  if (b_below_1 && a_below_2) return "extinction";
  if (i > 2 * j && a_above_2) return "specialists_win";
  if (i < 2 * j && b_above_1) return "generalists_win";
  if (i == 2 * j && a_above_2) return "neutral_line";
  return "subcritical_boundary";
}

double leading_real_part(const mf::State& s, const mf::Params& p) {
  constexpr double h = 1e-6;
  Eigen::Matrix4d jac;
  for (int k = 0; k < 4; ++k) {
    auto up = s.as_array();
    auto down = s.as_array();
    up[static_cast<std::size_t>(k)] += h;
    down[static_cast<std::size_t>(k)] -= h;
    const auto fu = mf::rhs(mf::State::from_array(up), p).as_array();
    const auto fd = mf::rhs(mf::State::from_array(down), p).as_array();
    for (int r = 0; r < 4; ++r)
      jac(r, k) = (fu[static_cast<std::size_t>(r)] - fd[static_cast<std::size_t>(r)]) / (2 * h);
  }
  return Eigen::EigenSolver<Eigen::Matrix4d>(jac, false).eigenvalues().real().maxCoeff();
}

void regime_map() {
  const auto inv = cli("c4_regimes", {"equilibria", "--a", "5", "--b", "2", "--grid-n", "50", "--grid-max", "6"});
  const auto lines = split(slurp(kRoot / "first" / "c4_regimes" / "regime_grid.csv"), '\n');
  std::map<std::pair<int, int>, std::string> seen;
  int mismatches = 0;
  for (const auto& line : lines) {
    const auto cells = split(line, ',');
    if (cells.size() != 3 || line[0] == '#' || cells[0] == "a") continue;
    const int i = static_cast<int>(std::lround(std::stod(cells[0]) * 25.0 / 3.0));
    const int j = static_cast<int>(std::lround(std::stod(cells[1]) * 25.0 / 3.0));
    seen[{i, j}] = cells[2];
  }
  bool complete = inv.code == 0 && seen.size() == 2500;
  for (int i = 1; i <= 50 && complete; ++i)
    for (int j = 1; j <= 50; ++j) {
      const auto it = seen.find({i, j});
      if (it == seen.end()) {
        complete = false;
        break;
      }
      const std::string expected = table_regime(i, j);
      if (it->second != expected) ++mismatches;
      if (mf::to_string(mf::classify_regime(mf::Rational{3 * i, 25}, mf::Rational{3 * j, 25})) != expected)
        ++mismatches;
    }

  int labels = 0;
  int wrong = 0;
  for (int i = 1; i <= 50; ++i)
    for (int j = 1; j <= 50; ++j) {
      const std::string regime = table_regime(i, j);
      if (regime == "subcritical_boundary" || regime == "neutral_line") continue;
      const mf::Params p{3.0 * i / 25.0, 3.0 * j / 25.0};
      for (const auto& e : mf::equilibria(p)) {
        const double lead = leading_real_part(e.state, p);
        const bool agrees = (e.stability == mf::Stability::stable && lead < -1e-6) ||
                            (e.stability == mf::Stability::unstable && lead > 1e-6) ||
                            (e.stability == mf::Stability::marginal && std::abs(lead) <= 1e-6);
        ++labels;
        if (!agrees) ++wrong;
      }
    }
  report(4, complete && mismatches == 0 && wrong == 0,
         std::to_string(mismatches) + " regime mismatches on 2500 cells, " + std::to_string(wrong) + "/" +
             std::to_string(labels) + " stability labels contradicted by the numerical Jacobian");
}

void invasion() {
  cli("c5_equilibria", {"equilibria", "--a", "5", "--b", "2"});
  const mf::Params p{5.0, 2.0};
  const std::array<double, 4> target{1.0 / 6.0, 0.0, 2.0 / 15.0, 1.0 / 5.0};
  std::optional<mf::State> found;
  for (const auto& e : mf::equilibria(p))
    if (e.kind == mf::EquilibriumKind::invasion_without_2) found = e.state;
  if (!found) {
    report(5, false, "no equilibrium with v22 = 0 and the other densities positive");
    return;
  }
  double dev = 0.0;
  double norm = 0.0;
  const auto v = found->as_array();
  const auto f = mf::rhs(*found, p).as_array();
  for (std::size_t k = 0; k < 4; ++k) {
    dev = std::max(dev, std::abs(v[k] - target[k]));
    norm += f[k] * f[k];
  }
  norm = std::sqrt(norm);
  auto start = *found;
  start.v22 = 1e-3;
  double escape = 0.0;
  for (const auto& s : mf::integrate(start, p, 200.0)) {
    double d = 0.0;
    const auto w = s.state.as_array();
    for (std::size_t k = 0; k < 4; ++k) d += (w[k] - v[k]) * (w[k] - v[k]);
    escape = std::max(escape, std::sqrt(d));
  }
  report(5, dev <= 1e-12 && norm <= 1e-12 && escape > 0.05,
         "deviation " + fmt(dev) + ", rhs norm " + fmt(norm) + ", perturbed run reaches distance " + fmt(escape));
}

void critical_alpha() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Setting {
    const char* L;
    const char* R;
  };
  const Setting settings[] = {{"2", "1"}, {"10", "1"}, {"25", "1"}, {"1", "4"}};
  std::vector<std::optional<double>> hats;
  std::string detail;
  for (const auto& s : settings) {
    const auto inv = cli(std::string("c6_sweep_L") + s.L + "_R" + s.R,
                         {"sweep-alpha", "--beta", "2", "--L", s.L, "--R", s.R, "--extent", "200", "--t-end", "100",
                          "--replicates", "8", "--alpha-grid", "1:8:0.25", "--seed", "2024"});
    hats.push_back(field(inv.out, "alpha_hat"));
    detail += std::string("L=") + s.L + ",R=" + s.R + ": " + (hats.back() ? fmt(*hats.back()) : "not_found") + "; ";
  }
  const double secs = seconds_since(t0);
  bool ok = std::all_of(hats.begin(), hats.end(), [](const auto& h) { return h && *h >= 2.0; });
  ok = ok && *hats[0] >= *hats[1] && *hats[1] >= *hats[2] && *hats[3] > *hats[2] && secs <= 1800.0;
  report(6, ok, detail + fmt(secs) + " s");
}

void coexistence() {
  int yes = 0;
  for (int r = 1; r <= 8; ++r) {
    const auto inv = cli("c7_coexist_" + std::to_string(r),
                         {"simulate", "--alpha", "3", "--beta", "0", "--L", "25", "--R", "1", "--extent", "200",
                          "--t-end", "100", "--init-density3", "0", "--coexist-types", "1,2", "--threshold", "0.02",
                          "--t-from", "50", "--seed", std::to_string(r)});
    if (inv.out.find("coexistence=yes") != std::string::npos) ++yes;
  }
  report(7, yes >= 7, std::to_string(yes) + "/8 replicates keep both specialists above 0.02 from t=50");
}

void contact_process() {
  int extinct = 0;
  int surviving = 0;
  for (int r = 1; r <= 10; ++r) {
    const std::vector<std::string> common{"simulate", "--L", "13", "--R", "1", "--extent", "52",
                                          "--init-density1", "0", "--init-density2", "0", "--init-density3", "0.5",
                                          "--seed", std::to_string(r)};
    auto low = common;
    low.insert(low.end(), {"--alpha", "0.1", "--beta", "0.1", "--t-end", "50"});
    const auto a = cli("c8_low_" + std::to_string(r), low);
    if (a.code == 0 && field(a.out, "rho0") == 1.0) ++extinct;
    auto high = common;
    high.insert(high.end(), {"--alpha", "2", "--beta", "2", "--t-end", "100"});
    const auto b = cli("c8_high_" + std::to_string(r), high);
    const auto rho3 = field(b.out, "rho3");
    if (b.code == 0 && rho3 && *rho3 >= 0.1) ++surviving;
  }
  report(8, extinct >= 9 && surviving >= 9,
         "beta=0.1 empty by t=50 in " + std::to_string(extinct) + "/10, beta=2 density >= 0.1 at t=100 in " +
             std::to_string(surviving) + "/10 (52x52 torus, L=13)");
}

void performance() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto inv = cli("c9_perf", {"simulate", "--alpha", "3", "--beta", "2", "--L", "10", "--R", "1", "--extent",
                                   "200", "--t-end", "100", "--seed", "1"});
  const double secs = seconds_since(t0);
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double mib = static_cast<double>(usage.ru_maxrss) / 1024.0;
  report(9, inv.code == 0 && secs <= 60.0 && mib <= 1024.0,
         fmt(secs) + " s, peak resident set of the whole harness " + fmt(mib) + " MiB");
}

void determinism() {
  int differing = 0;
  int files = 0;
  for (const auto& inv : history) {
    const auto again = run_in(kRoot / "second", inv.key, inv.args);
    if (again.code != inv.code || again.out != inv.out) {
      ++differing;
      std::cerr << inv.key << ": stdout or exit code differs\n";
    }
    const fs::path a = kRoot / "first" / inv.key;
    const fs::path b = kRoot / "second" / inv.key;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        ++differing;
        std::cerr << inv.key << ": " << entry.path().filename().string() << " differs\n";
      }
    }
    for (const auto& entry : fs::directory_iterator(b))
      if (!fs::exists(a / entry.path().filename())) ++differing;
  }
  report(10, differing == 0 && files > 0,
         std::to_string(history.size()) + " commands rerun, " + std::to_string(files) + " files compared, " +
             std::to_string(differing) + " differences");
}

}  // namespace

int main(int argc, char** argv) {
  const bool skip_sweep = argc > 1 && std::string(argv[1]) == "--skip-sweep";
  fs::remove_all(kRoot);
  performance();
  duality();
  coupling();
  meanfield_figure();
  regime_map();
  invasion();
  coexistence();
  contact_process();
  if (!skip_sweep) critical_alpha();
  determinism();
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
