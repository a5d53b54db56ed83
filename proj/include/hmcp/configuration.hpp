#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hmcp/habitat.hpp"

namespace hmcp {

/// Occupant of a site. Specialists of type 1/2 only ever sit on hosts of the
/// matching type.
enum class State : std::uint8_t { empty = 0, specialist1 = 1, specialist2 = 2, generalist = 3 };

constexpr int to_int(State s) { return static_cast<int>(s); }
constexpr bool is_specialist(State s) {
  return s == State::specialist1 || s == State::specialist2;
}
State state_from_int(int v);

/// Birth rates per occupied neighbor; deaths always happen at rate 1.
struct Params {
  double alpha = 0.0;  // specialists
  double beta = 0.0;   // generalists

  void validate() const;
};

/// Per-type site counts (index = to_int(State)).
using Counts = std::array<std::int64_t, 4>;

class Configuration {
 public:
  /// All-empty configuration.
  explicit Configuration(std::shared_ptr<const Lattice> lattice);
  /// Throws std::invalid_argument if a specialist sits on an unsuitable host.
  Configuration(std::shared_ptr<const Lattice> lattice, std::vector<State> states);

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }
  const HabitatSpec& spec() const { return lattice_->spec(); }
  SiteIndex size() const { return lattice_->size(); }

  State at(SiteIndex i) const { return states_[static_cast<std::size_t>(i)]; }
  /// Checked write; rejects unsuitable specialists.
  void set(SiteIndex i, State s);
  std::span<const State> states() const { return states_; }

  /// Whether state s may sit at site i.
  bool suitable(SiteIndex i, State s) const {
    return !is_specialist(s) || lattice_->host(i) == to_int(s);
  }

  Counts counts() const;

  bool operator==(const Configuration& other) const {
    return lattice_->spec() == other.lattice_->spec() && states_ == other.states_;
  }

 private:
  friend class ConfigurationAccess;
  std::shared_ptr<const Lattice> lattice_;
  std::vector<State> states_;
};

/// Unchecked mutable access for the simulators, which maintain suitability
/// themselves.
class ConfigurationAccess {
 public:
  static std::vector<State>& states(Configuration& c) { return c.states_; }
};

/// Independent per-site draw: state 1 w.p. density1, 2 w.p. density2,
/// 3 w.p. density3, else empty. Specialist draws that land on the wrong host
/// become empty.
struct ProductDensities {
  double density1 = 0.25;
  double density2 = 0.25;
  double density3 = 0.25;
};

struct AllOfType {
  State state = State::empty;
};

struct ExplicitGrid {
  std::vector<State> states;
};

using InitPolicy = std::variant<ProductDensities, AllOfType, ExplicitGrid>;

/// Deterministic in (lattice, policy, seed). For AllOfType with a specialist,
/// only the matching host half is filled.
Configuration init_config(std::shared_ptr<const Lattice> lattice, const InitPolicy& policy,
                          std::uint64_t seed);

}  // namespace hmcp
