#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hmcp/configuration.hpp"

namespace hmcp {

/// One mark of the graphical representation. A death has target == -1; an
/// arrow runs from `site` to `target`.
///
/// s_flag: the arrow may not be used by generalists (coin with success
///         probability (alpha - beta) / alpha).
/// g_flag: the arrow crosses between host types and may not be used by
///         specialists. Arrows with both flags carry no births.
struct GraphEvent {
  double time = 0.0;
  SiteIndex site = 0;
  SiteIndex target = -1;
  bool s_flag = false;
  bool g_flag = false;

  bool is_death() const { return target < 0; }

  static GraphEvent death(double t, SiteIndex x) { return {t, x, -1, false, false}; }
  /// g_flag is filled in from the endpoints when the log is assembled.
  static GraphEvent arrow(double t, SiteIndex from, SiteIndex to, bool s = false) {
    return {t, from, to, s, false};
  }

  /// Whether an offspring of `occupant` can pass through this arrow.
  bool usable_by(State occupant) const {
    if (occupant == State::empty) return false;
    return occupant == State::generalist ? !s_flag : !g_flag;
  }
};

class EventLogError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Materialized graphical representation on (0, window]: rate-1 death marks
/// at every site and rate-alpha arrows along every directed neighbor pair.
/// Events are held in strictly increasing time order, with per-site indices
/// for backward (dual) traversal.
class EventLog {
 public:
  /// Default cap on the number of stored events.
  static constexpr std::int64_t kDefaultBudget = 20'000'000;

  /// Samples a log. Requires alpha >= beta. Throws EventLogError when the
  /// expected event count exceeds `budget`.
  static EventLog generate(std::shared_ptr<const Lattice> lattice, const Params& params,
                           double window, std::uint64_t seed,
                           std::int64_t budget = kDefaultBudget);

  /// Assembles a log from explicit events (any order). g_flag is recomputed
  /// from the endpoints. Throws on times outside (0, window], tied times,
  /// arrows between non-neighbors, or out-of-range sites.
  static EventLog from_events(std::shared_ptr<const Lattice> lattice, double window,
                              std::vector<GraphEvent> events);

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }
  double window() const { return window_; }
  std::span<const GraphEvent> events() const { return events_; }
  const GraphEvent& event(std::uint32_t i) const { return events_[i]; }

  /// Indices (into events()) of deaths at x, ascending in time.
  std::span<const std::uint32_t> deaths_at(SiteIndex x) const;
  /// Indices of arrows whose tip is at x, ascending in time.
  std::span<const std::uint32_t> arrows_into(SiteIndex x) const;

  /// Death times at x.
  std::vector<double> death_times(SiteIndex x) const;
  /// Arrows from x to z, ascending in time.
  std::vector<GraphEvent> arrows_between(SiteIndex x, SiteIndex z) const;

 private:
  EventLog() = default;
  void index();

  std::shared_ptr<const Lattice> lattice_;
  double window_ = 0.0;
  std::vector<GraphEvent> events_;
  std::vector<std::uint32_t> death_offsets_, death_index_;
  std::vector<std::uint32_t> arrow_offsets_, arrow_index_;
};

/// Forward replay of the log from config0: a death empties its site; an
/// arrow copies the occupant of its tail onto an empty tip unless the label
/// blocks that occupant.
Configuration evolve_by_events(Configuration config0, const EventLog& log);

/// Same replay, stopping after the last event with time <= t.
Configuration evolve_by_events(Configuration config0, const EventLog& log, double t);

}  // namespace hmcp
