#include "hmcp/dual.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

namespace hmcp {

HierarchyKey::HierarchyKey(std::vector<int> digits) : digits_(std::move(digits)) {
  while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
}

HierarchyKey HierarchyKey::child(int k) const {
  std::vector<int> d = digits_;
  d.push_back(k);
  return HierarchyKey(std::move(d));
}

bool HierarchyKey::descends_from(const HierarchyKey& prefix) const {
  if (prefix.digits_.size() > digits_.size()) return false;
  return std::equal(prefix.digits_.begin(), prefix.digits_.end(), digits_.begin());
}

std::string HierarchyKey::str() const {
  if (digits_.empty()) return "()";
  std::string out = "(";
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(digits_[i]);
  }
  return out + ")";
}

std::strong_ordering operator<=>(const HierarchyKey& a, const HierarchyKey& b) {
  const std::size_t n = std::max(a.digits_.size(), b.digits_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int x = i < a.digits_.size() ? a.digits_[i] : 0;
    const int y = i < b.digits_.size() ? b.digits_[i] : 0;
    if (x != y) return x <=> y;
  }
  return std::strong_ordering::equal;
}

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

void check_window(SiteIndex x, double T, const EventLog& log) {
  if (x < 0 || x >= log.lattice().size()) throw std::invalid_argument("site index out of range");
  if (!(T >= 0.0 && T <= log.window()))
    throw std::invalid_argument("T must lie in [0, window] of the event log");
}

/// Time of the last death at z with time <= t, or 0 when there is none.
/// `found` reports whether one exists.
double last_death(const EventLog& log, SiteIndex z, double t, bool& found) {
  const auto deaths = log.deaths_at(z);
  auto it = std::upper_bound(deaths.begin(), deaths.end(), t, [&](double v, std::uint32_t i) {
    return v < log.event(i).time;
  });
  found = it != deaths.begin();
  return found ? log.event(*(it - 1)).time : 0.0;
}

/// Arrows into z with time in (after, upto], as a half-open index range into
/// arrows_into(z).
std::pair<std::size_t, std::size_t> arrivals(const EventLog& log, SiteIndex z, double after,
                                             double upto) {
  const auto in = log.arrows_into(z);
  auto time_of = [&](std::uint32_t i) { return log.event(i).time; };
  auto lo = std::upper_bound(in.begin(), in.end(), after,
                             [&](double v, std::uint32_t i) { return v < time_of(i); });
  auto hi = std::upper_bound(in.begin(), in.end(), upto,
                             [&](double v, std::uint32_t i) { return v < time_of(i); });
  return {static_cast<std::size_t>(lo - in.begin()), static_cast<std::size_t>(hi - in.begin())};
}

/// Position (1-based) of arrow `e` among the tips on its target's segment,
/// counted upward from the first death mark below it.
int tip_index(const EventLog& log, const GraphEvent& e) {
  bool found = false;
  const double d = last_death(log, e.target, e.time, found);
  const auto [lo, hi] = arrivals(log, e.target, found ? d : -1.0, e.time);
  return static_cast<int>(hi - lo);
}

/// Backward sweep over the log maintaining the live ancestor set with keys.
class DualSweep {
 public:
  DualSweep(SiteIndex x, const EventLog& log) : log_(log), keys_(static_cast<std::size_t>(log.lattice().size())) {
    add(x, HierarchyKey{});
  }

  /// Processes one event; returns the edge created, if any.
  std::optional<DualEdge> step(const GraphEvent& e) {
    if (e.is_death()) {
      auto& k = keys_[static_cast<std::size_t>(e.site)];
      if (k) {
        order_.erase({*k, e.site});
        k.reset();
      }
      return std::nullopt;
    }
    const auto& parent = keys_[static_cast<std::size_t>(e.target)];
    if (!parent) return std::nullopt;
    HierarchyKey offer = parent->child(tip_index(log_, e));
    auto& current = keys_[static_cast<std::size_t>(e.site)];
    if (current && !(offer < *current)) return std::nullopt;
    DualEdge edge{*parent, offer, e.site, e.time};
    if (current) order_.erase({*current, e.site});
    add(e.site, std::move(offer));
    return edge;
  }

  bool alive() const { return !order_.empty(); }
  SiteIndex first() const { return order_.begin()->second; }

  std::vector<Ancestor> ancestors() const {
    std::vector<Ancestor> out;
    for (const auto& [key, site] : order_) out.push_back({site, key});
    return out;
  }

 private:
  void add(SiteIndex site, HierarchyKey key) {
    order_.insert({key, site});
    keys_[static_cast<std::size_t>(site)] = std::move(key);
  }

  const EventLog& log_;
  std::vector<std::optional<HierarchyKey>> keys_;
  std::set<std::pair<HierarchyKey, SiteIndex>> order_;
};

/// Events with time in (T - s, T], newest first.
template <typename F>
void for_each_backward(const EventLog& log, double T, double s, F&& f) {
  const auto events = log.events();
  auto hi = std::upper_bound(events.begin(), events.end(), T,
                             [](double v, const GraphEvent& e) { return v < e.time; });
  const double floor = T - s;
  for (auto it = hi; it != events.begin();) {
    --it;
    if (it->time <= floor) break;
    if (!f(*it)) break;
  }
}

}  // namespace

DualState dual_ancestors(SiteIndex x, double T, const EventLog& log, double s) {
  check_window(x, T, log);
  if (!(s >= 0.0 && s <= T)) throw std::invalid_argument("dual time s must lie in [0, T]");
  DualSweep sweep(x, log);
  for_each_backward(log, T, s, [&](const GraphEvent& e) {
    sweep.step(e);
    return true;
  });
  return {x, T, s, sweep.ancestors()};
}

std::vector<PathPiece> distinguished_path(SiteIndex x, double T, const EventLog& log) {
  check_window(x, T, log);
  DualSweep sweep(x, log);
  std::vector<PathPiece> path{{0.0, x}};
  for_each_backward(log, T, T, [&](const GraphEvent& e) {
    sweep.step(e);
    const SiteIndex now = sweep.alive() ? sweep.first() : -1;
    if (now != path.back().site) path.push_back({T - e.time, now});
    return now >= 0;
  });
  return path;
}

std::vector<DualEdge> dual_tree_edges(SiteIndex x, double T, const EventLog& log) {
  check_window(x, T, log);
  DualSweep sweep(x, log);
  std::vector<DualEdge> edges;
  for_each_backward(log, T, T, [&](const GraphEvent& e) {
    if (auto edge = sweep.step(e)) edges.push_back(std::move(*edge));
    return sweep.alive();
  });
  return edges;
}

State reconstruct_type(SiteIndex x, double T, const EventLog& log, const Configuration& xi0) {
  check_window(x, T, log);
  if (!(xi0.spec() == log.lattice().spec()))
    throw std::invalid_argument("configuration and event log live on different habitats");

  // resolved[i]: type carried by the tail of arrow i at its time, or -1.
  std::vector<std::int8_t> resolved(log.events().size(), -1);

  struct Frame {
    SiteIndex site;
    std::size_t pos, end;
    std::uint32_t via;  // arrow whose tail this frame resolves, or kNone
  };
  std::vector<Frame> stack;

  // Either answers (z, t) immediately from z's own lineage or pushes a frame
  // that scans the arrows on z's segment oldest first.
  auto open = [&](SiteIndex z, double t, std::uint32_t via) -> std::optional<State> {
    bool died = false;
    const double d = last_death(log, z, t, died);
    if (!died && xi0.at(z) != State::empty) return xi0.at(z);
    const auto [lo, hi] = arrivals(log, z, died ? d : -1.0, t);
    if (lo == hi) return State::empty;
    stack.push_back({z, lo, hi, via});
    return std::nullopt;
  };

  if (auto direct = open(x, T, kNone)) return *direct;
  std::optional<State> finished;  // result of the frame just popped
  while (true) {
    const std::size_t top = stack.size() - 1;
    std::optional<State> answer;
    if (finished) {
      // The child for arrows_into(site)[pos] of the top frame just completed.
      const GraphEvent& e = log.event(log.arrows_into(stack[top].site)[stack[top].pos]);
      if (*finished != State::empty && e.usable_by(*finished)) answer = *finished;
      else ++stack[top].pos;
      finished.reset();
    }
    bool descended = false;
    while (!answer && stack[top].pos < stack[top].end) {
      const std::uint32_t ei = log.arrows_into(stack[top].site)[stack[top].pos];
      const GraphEvent& e = log.event(ei);
      std::optional<State> tail;
      if (resolved[ei] >= 0) {
        tail = static_cast<State>(resolved[ei]);
      } else {
        tail = open(e.site, e.time, ei);
        if (!tail) {
          descended = true;
          break;
        }
        resolved[ei] = static_cast<std::int8_t>(to_int(*tail));
      }
      if (*tail != State::empty && e.usable_by(*tail)) answer = *tail;
      else ++stack[top].pos;
    }
    if (descended) continue;
    const State result = answer.value_or(State::empty);
    const std::uint32_t via = stack[top].via;
    stack.pop_back();
    if (via == kNone) return result;
    resolved[via] = static_cast<std::int8_t>(to_int(result));
    finished = result;
  }
}

State reconstruct_type_exhaustive(SiteIndex x, double T, const EventLog& log,
                                  const Configuration& xi0, std::size_t max_branches) {
  check_window(x, T, log);
  if (!(xi0.spec() == log.lattice().spec()))
    throw std::invalid_argument("configuration and event log live on different habitats");

  struct Branch {
    SiteIndex site;
    HierarchyKey key;
    double top;
    int parent;
    std::uint32_t via;  // arrow from this branch's site into the parent's
    bool reaches_origin;
  };
  std::vector<Branch> tree{{x, HierarchyKey{}, T, -1, kNone, false}};
  for (std::size_t b = 0; b < tree.size(); ++b) {
    bool died = false;
    const double d = last_death(log, tree[b].site, tree[b].top, died);
    tree[b].reaches_origin = !died;
    const auto [lo, hi] = arrivals(log, tree[b].site, died ? d : -1.0, tree[b].top);
    const auto in = log.arrows_into(tree[b].site);
    for (std::size_t p = lo; p < hi; ++p) {
      if (tree.size() >= max_branches) throw std::length_error("ancestor tree exceeds branch budget");
      const GraphEvent& e = log.event(in[p]);
      tree.push_back({e.site, tree[b].key.child(static_cast<int>(p - lo + 1)), e.time,
                      static_cast<int>(b), in[p], false});
    }
  }

  std::vector<std::size_t> leaves;
  for (std::size_t b = 0; b < tree.size(); ++b)
    if (tree[b].reaches_origin) leaves.push_back(b);
  std::sort(leaves.begin(), leaves.end(),
            [&](std::size_t a, std::size_t b) { return tree[a].key < tree[b].key; });

  std::vector<HierarchyKey> discarded;
  for (std::size_t leaf : leaves) {
    const Branch& start = tree[leaf];
    if (std::any_of(discarded.begin(), discarded.end(),
                    [&](const HierarchyKey& k) { return start.key.descends_from(k); }))
      continue;
    const State type = xi0.at(start.site);
    if (type == State::empty) continue;
    int c = static_cast<int>(leaf);
    bool blocked = false;
    while (tree[static_cast<std::size_t>(c)].parent >= 0) {
      const Branch& br = tree[static_cast<std::size_t>(c)];
      if (!log.event(br.via).usable_by(type)) {
        discarded.push_back(br.key);
        blocked = true;
        break;
      }
      c = br.parent;
    }
    if (!blocked) return type;
  }
  return State::empty;
}

}  // namespace hmcp
