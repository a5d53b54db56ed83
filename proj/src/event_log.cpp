#include "hmcp/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmcp/rng.hpp"

namespace hmcp {

namespace {

bool by_time(const GraphEvent& a, const GraphEvent& b) { return a.time < b.time; }

bool has_ties(const std::vector<GraphEvent>& sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].time == sorted[i - 1].time) return true;
  return false;
}

void build_index(const std::vector<GraphEvent>& events, SiteIndex n, bool deaths,
                 std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& index) {
  offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : events)
    if (e.is_death() == deaths) ++offsets[static_cast<std::size_t>(deaths ? e.site : e.target) + 1];
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
  index.assign(offsets.back(), 0);
  std::vector<std::uint32_t> fill(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.is_death() != deaths) continue;
    index[fill[static_cast<std::size_t>(deaths ? e.site : e.target)]++] = i;
  }
}

}  // namespace

void EventLog::index() {
  build_index(events_, lattice_->size(), true, death_offsets_, death_index_);
  build_index(events_, lattice_->size(), false, arrow_offsets_, arrow_index_);
}

EventLog EventLog::generate(std::shared_ptr<const Lattice> lattice, const Params& params,
                            double window, std::uint64_t seed, std::int64_t budget) {
  params.validate();
  if (params.alpha < params.beta)
    throw EventLogError("the labelled graphical representation needs alpha >= beta");
  if (!(window >= 0.0) || !std::isfinite(window)) throw EventLogError("window must be >= 0");

  const int nu = lattice->neighborhood_size();
  const double expected =
      static_cast<double>(lattice->size()) * window * (1.0 + params.alpha * nu);
  if (expected > static_cast<double>(budget) ||
      expected * 1.5 > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
    throw EventLogError("window too large: about " + std::to_string(static_cast<long long>(expected)) +
                        " events expected, budget is " + std::to_string(budget));

  const double s_prob = params.alpha > 0.0 ? (params.alpha - params.beta) / params.alpha : 0.0;

  EventLog log;
  log.lattice_ = std::move(lattice);
  log.window_ = window;
  const Lattice& lat = *log.lattice_;

  // Ties have probability zero; if rounding produces one, redraw everything
  // from the next derived stream.
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(attempt == 0 ? seed : derive_seed(seed, {attempt}));
    std::vector<GraphEvent> events;
    events.reserve(static_cast<std::size_t>(expected * 1.05) + 16);
    for (SiteIndex x = 0; x < lat.size(); ++x) {
      for (double t = rng.exponential(1.0); t <= window; t += rng.exponential(1.0))
        events.push_back(GraphEvent::death(t, x));
      if (params.alpha <= 0.0) continue;
      for (int k = 0; k < nu; ++k) {
        const SiteIndex z = lat.neighbor(x, k);
        const bool g = lat.host(x) != lat.host(z);
        for (double t = rng.exponential(params.alpha); t <= window; t += rng.exponential(params.alpha))
          events.push_back({t, x, z, rng.bernoulli(s_prob), g});
      }
    }
    std::stable_sort(events.begin(), events.end(), by_time);
    if (has_ties(events) || (!events.empty() && events.front().time <= 0.0)) continue;
    log.events_ = std::move(events);
    break;
  }
  log.index();
  return log;
}

EventLog EventLog::from_events(std::shared_ptr<const Lattice> lattice, double window,
                               std::vector<GraphEvent> events) {
  if (!(window >= 0.0) || !std::isfinite(window)) throw EventLogError("window must be >= 0");
  const Lattice& lat = *lattice;
  for (auto& e : events) {
    if (!(e.time > 0.0 && e.time <= window))
      throw EventLogError("event time " + std::to_string(e.time) + " outside (0, window]");
    if (e.site < 0 || e.site >= lat.size()) throw EventLogError("event site out of range");
    if (e.is_death()) {
      e.s_flag = e.g_flag = false;
      continue;
    }
    if (e.target >= lat.size()) throw EventLogError("arrow tip out of range");
    const int dist = lat.distance(e.site, e.target);
    if (dist < 1 || dist > lat.spec().R) throw EventLogError("arrow joins sites that are not neighbors");
    e.g_flag = lat.host(e.site) != lat.host(e.target);
  }
  std::stable_sort(events.begin(), events.end(), by_time);
  if (has_ties(events)) throw EventLogError("two events share a time; replay order would be ambiguous");
  if (events.size() > std::numeric_limits<std::uint32_t>::max()) throw EventLogError("too many events");
  EventLog log;
  log.lattice_ = std::move(lattice);
  log.window_ = window;
  log.events_ = std::move(events);
  log.index();
  return log;
}

std::span<const std::uint32_t> EventLog::deaths_at(SiteIndex x) const {
  const auto b = death_offsets_[static_cast<std::size_t>(x)];
  const auto e = death_offsets_[static_cast<std::size_t>(x) + 1];
  return {death_index_.data() + b, e - b};
}

std::span<const std::uint32_t> EventLog::arrows_into(SiteIndex x) const {
  const auto b = arrow_offsets_[static_cast<std::size_t>(x)];
  const auto e = arrow_offsets_[static_cast<std::size_t>(x) + 1];
  return {arrow_index_.data() + b, e - b};
}

std::vector<double> EventLog::death_times(SiteIndex x) const {
  std::vector<double> out;
  for (auto i : deaths_at(x)) out.push_back(events_[i].time);
  return out;
}

std::vector<GraphEvent> EventLog::arrows_between(SiteIndex x, SiteIndex z) const {
  std::vector<GraphEvent> out;
  for (auto i : arrows_into(z))
    if (events_[i].site == x) out.push_back(events_[i]);
  return out;
}

Configuration evolve_by_events(Configuration config0, const EventLog& log) {
  return evolve_by_events(std::move(config0), log, log.window());
}

Configuration evolve_by_events(Configuration config0, const EventLog& log, double t) {
  if (!(config0.spec() == log.lattice().spec()))
    throw std::invalid_argument("configuration and event log live on different habitats");
  auto& grid = ConfigurationAccess::states(config0);
  for (const GraphEvent& e : log.events()) {
    if (e.time > t) break;
    if (e.is_death()) {
      grid[static_cast<std::size_t>(e.site)] = State::empty;
      continue;
    }
    const State parent = grid[static_cast<std::size_t>(e.site)];
    State& child = grid[static_cast<std::size_t>(e.target)];
    if (child == State::empty && e.usable_by(parent)) child = parent;
  }
  return config0;
}

}  // namespace hmcp
