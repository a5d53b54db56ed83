#include "hmcp/configuration.hpp"

#include <cmath>
#include <string>

#include "hmcp/rng.hpp"

namespace hmcp {

State state_from_int(int v) {
  if (v < 0 || v > 3) throw std::invalid_argument("state must be in {0,1,2,3}, got " + std::to_string(v));
  return static_cast<State>(v);
}

void Params::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw std::invalid_argument("alpha must be finite and non-negative");
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("beta must be finite and non-negative");
}

Configuration::Configuration(std::shared_ptr<const Lattice> lattice)
    : lattice_(std::move(lattice)), states_(static_cast<std::size_t>(lattice_->size()), State::empty) {}

Configuration::Configuration(std::shared_ptr<const Lattice> lattice, std::vector<State> states)
    : lattice_(std::move(lattice)), states_(std::move(states)) {
  if (static_cast<SiteIndex>(states_.size()) != lattice_->size())
    throw std::invalid_argument("grid has " + std::to_string(states_.size()) + " sites, lattice has " +
                                std::to_string(lattice_->size()));
  for (SiteIndex i = 0; i < lattice_->size(); ++i)
    if (!suitable(i, at(i)))
      throw std::invalid_argument("specialist " + std::to_string(to_int(at(i))) + " at site " +
                                  std::to_string(i) + " sits on host " +
                                  std::to_string(lattice_->host(i)));
}

void Configuration::set(SiteIndex i, State s) {
  if (i < 0 || i >= size()) throw std::out_of_range("site index out of range");
  if (!suitable(i, s))
    throw std::invalid_argument("specialist " + std::to_string(to_int(s)) + " cannot sit on host " +
                                std::to_string(lattice_->host(i)));
  states_[static_cast<std::size_t>(i)] = s;
}

Counts Configuration::counts() const {
  Counts n{};
  for (State s : states_) ++n[static_cast<std::size_t>(to_int(s))];
  return n;
}

namespace {

struct InitVisitor {
  const std::shared_ptr<const Lattice>& lattice;
  std::uint64_t seed;

  Configuration operator()(const ProductDensities& p) const {
    for (double v : {p.density1, p.density2, p.density3})
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("densities must lie in [0, 1]");
    if (p.density1 + p.density2 + p.density3 > 1.0 + 1e-12)
      throw std::invalid_argument("densities must sum to at most 1");
    Configuration c(lattice);
    auto& grid = ConfigurationAccess::states(c);
    Rng rng(seed);
    for (SiteIndex i = 0; i < lattice->size(); ++i) {
      const double u = rng.uniform();
      State s = State::empty;
      if (u < p.density1)
        s = State::specialist1;
      else if (u < p.density1 + p.density2)
        s = State::specialist2;
      else if (u < p.density1 + p.density2 + p.density3)
        s = State::generalist;
      grid[static_cast<std::size_t>(i)] = c.suitable(i, s) ? s : State::empty;
    }
    return c;
  }

  Configuration operator()(const AllOfType& a) const {
    Configuration c(lattice);
    for (SiteIndex i = 0; i < lattice->size(); ++i)
      if (c.suitable(i, a.state)) ConfigurationAccess::states(c)[static_cast<std::size_t>(i)] = a.state;
    return c;
  }

  Configuration operator()(const ExplicitGrid& g) const { return Configuration(lattice, g.states); }
};

}  // namespace

Configuration init_config(std::shared_ptr<const Lattice> lattice, const InitPolicy& policy,
                          std::uint64_t seed) {
  return std::visit(InitVisitor{lattice, seed}, policy);
}

}  // namespace hmcp
