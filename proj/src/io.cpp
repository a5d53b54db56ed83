#include "hmcp/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hmcp {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string RunManifest::text() const {
  std::ostringstream out;
  out << "subcommand = " << subcommand << '\n';
  out << "version = " << version << '\n';
  out << "seed = " << seed << '\n';
  for (const auto& [k, v] : params) out << k << " = " << v << '\n';
  for (const auto& path : outputs) out << "output = " << path << '\n';
  return out.str();
}

std::string RunManifest::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void manifest_line(std::ostream& out, const std::string& digest) { out << "# manifest " << digest << '\n'; }

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::string& digest) {
  manifest_line(out, digest);
  out << "t,n0,n1,n2,n3,rho1,rho2,rho3\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t);
    for (auto n : s.counts) out << ',' << n;
    for (State st : {State::specialist1, State::specialist2, State::generalist})
      out << ',' << format_double(s.density(st));
    out << '\n';
  }
}

void write_snapshot(std::ostream& out, const Configuration& config, double t, std::uint64_t seed,
                    const std::string& digest) {
  const HabitatSpec& spec = config.spec();
  manifest_line(out, digest);
  out << "# d=" << spec.d << " L=" << spec.L << " R=" << spec.R << " extent=" << spec.extent
      << " t=" << format_double(t) << " seed=" << seed << '\n';
  std::string row;
  const auto states = config.states();
  for (std::size_t i = 0; i < states.size(); ++i) {
    row += static_cast<char>('0' + to_int(states[i]));
    if (row.size() == static_cast<std::size_t>(spec.extent)) {
      out << row << '\n';
      row.clear();
    }
  }
}

SnapshotFile read_snapshot(std::istream& in) {
  SnapshotFile file;
  bool have_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string token;
      int seen = 0;
      while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
          if (key == "d") file.spec.d = std::stoi(value), ++seen;
          else if (key == "L") file.spec.L = std::stoi(value), ++seen;
          else if (key == "R") file.spec.R = std::stoi(value), ++seen;
          else if (key == "extent") file.spec.extent = std::stoi(value), ++seen;
          else if (key == "t") file.t = std::stod(value), ++seen;
          else if (key == "seed") file.seed = std::stoull(value), ++seen;
        } catch (const std::exception&) {
          throw std::runtime_error("malformed snapshot header field '" + token + "'");
        }
      }
      if (seen == 6) have_header = true;
      continue;
    }
    if (!have_header) throw std::runtime_error("snapshot rows before the geometry header");
    if (static_cast<int>(line.size()) != file.spec.extent)
      throw std::runtime_error("snapshot row of length " + std::to_string(line.size()) + ", expected " +
                               std::to_string(file.spec.extent));
    for (char c : line) {
      if (c < '0' || c > '3') throw std::runtime_error(std::string("invalid site character '") + c + "'");
      file.states.push_back(static_cast<State>(c - '0'));
    }
  }
  if (!have_header) throw std::runtime_error("snapshot has no geometry header");
  std::size_t expected = 1;
  for (int i = 0; i < file.spec.d; ++i) expected *= static_cast<std::size_t>(file.spec.extent);
  if (file.states.size() != expected)
    throw std::runtime_error("snapshot has " + std::to_string(file.states.size()) + " sites, expected " +
                             std::to_string(expected));
  return file;
}

void write_meanfield_csv(std::ostream& out, const std::vector<meanfield::Sample>& samples,
                         const std::string& digest) {
  manifest_line(out, digest);
  out << "t,v11,v22,v13,v23,u1,u2\n";
  for (const auto& s : samples) {
    const auto& v = s.state;
    out << format_double(s.t) << ',' << format_double(v.v11) << ',' << format_double(v.v22) << ','
        << format_double(v.v13) << ',' << format_double(v.v23) << ',' << format_double(v.u1()) << ','
        << format_double(v.u2()) << '\n';
  }
}

void write_equilibria_csv(std::ostream& out, const meanfield::Params& p,
                          const std::vector<meanfield::Equilibrium>& eqs, const std::string& digest) {
  manifest_line(out, digest);
  out << "kind,v11,v22,v13,v23,stability,leading_rate,rhs_norm\n";
  for (const auto& e : eqs) {
    const auto f = meanfield::rhs(e.state, p).as_array();
    double norm = 0.0;
    for (double x : f) norm = std::max(norm, std::abs(x));
    out << meanfield::to_string(e.kind) << ',' << format_double(e.state.v11) << ','
        << format_double(e.state.v22) << ',' << format_double(e.state.v13) << ','
        << format_double(e.state.v23) << ',' << meanfield::to_string(e.stability) << ','
        << format_double(e.leading_rate) << ',' << format_double(norm) << '\n';
  }
}

void write_regime_grid_csv(std::ostream& out, const std::vector<RegimeCell>& cells, const std::string& digest) {
  manifest_line(out, digest);
  out << "a,b,regime\n";
  for (const auto& c : cells)
    out << format_double(c.a) << ',' << format_double(c.b) << ',' << meanfield::to_string(c.regime) << '\n';
}

void write_sweep_csv(std::ostream& out, const CriticalAlphaResult& result, const std::string& digest) {
  manifest_line(out, digest);
  out << "beta,L,R,extent,t_end,alpha,mean_rho_spec,mean_rho_gen,alpha_hat_flag\n";
  for (const auto& p : result.points) {
    const bool flag = result.alpha_hat && *result.alpha_hat == p.alpha;
    out << format_double(result.beta) << ',' << result.spec.L << ',' << result.spec.R << ','
        << result.spec.extent << ',' << format_double(result.t_end) << ',' << format_double(p.alpha) << ','
        << format_double(p.mean_rho_spec) << ',' << format_double(p.mean_rho_gen) << ',' << (flag ? 1 : 0)
        << '\n';
  }
}

void write_block_map(std::ostream& out, const std::vector<std::string>& rows, double t, const std::string& digest) {
  manifest_line(out, digest);
  out << "# t=" << format_double(t) << '\n';
  for (const auto& r : rows) out << r << '\n';
}

void write_dual_edges(std::ostream& out, const std::vector<DualEdge>& edges, const std::string& digest) {
  manifest_line(out, digest);
  out << "parent_key,child_key,site,time\n";
  for (const auto& e : edges)
    out << '"' << e.parent.str() << "\",\"" << e.child.str() << "\"," << e.site << ',' << format_double(e.time)
        << '\n';
}

void write_boundary_profile(std::ostream& out, const std::vector<ProfileRow>& rows, const std::string& digest) {
  manifest_line(out, digest);
  out << "depth,sites,rho0,rho1,rho2,rho3\n";
  for (const auto& r : rows) {
    out << r.depth << ',' << r.sites;
    for (double v : r.rho) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace hmcp
