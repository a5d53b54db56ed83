#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "hmcp/event_log.hpp"

namespace hmcp {

/// Position in the ancestor hierarchy: a finite integer sequence compared
/// lexicographically, where a sequence is identified with its extension by
/// zeros. Stored trimmed of trailing zeros, so the empty key is "0", the key
/// of the starting site.
class HierarchyKey {
 public:
  HierarchyKey() = default;
  explicit HierarchyKey(std::vector<int> digits);

  const std::vector<int>& digits() const { return digits_; }
  /// This key followed by k.
  HierarchyKey child(int k) const;
  /// Whether `prefix` is an initial segment of this key (every key is a
  /// descendant of itself).
  bool descends_from(const HierarchyKey& prefix) const;

  std::string str() const;

  friend std::strong_ordering operator<=>(const HierarchyKey& a, const HierarchyKey& b);
  friend bool operator==(const HierarchyKey& a, const HierarchyKey& b) { return a.digits_ == b.digits_; }

 private:
  std::vector<int> digits_;
};

struct Ancestor {
  SiteIndex site = 0;
  HierarchyKey key;
};

/// Ancestors of (origin, T) at dual time s (forward time T - s), sorted by
/// hierarchy key. The first one is the distinguished particle.
struct DualState {
  SiteIndex origin = 0;
  double T = 0.0;
  double s = 0.0;
  std::vector<Ancestor> ancestors;

  bool alive() const { return !ancestors.empty(); }
};

/// Sites reachable from (x, T) by dual paths down to forward time T - s.
///
/// The walk goes backward through the log. A death mark at a live site
/// removes it; the tip of an arrow y -> z at a live z makes y live. Keys
/// follow the tip enumeration: if z holds key u and, counting upward from
/// the first death mark below, the arrow is the k-th tip on z's segment,
/// y is offered key (u, k). A site already live keeps the smaller of its key
/// and the offer. Labels are ignored.
DualState dual_ancestors(SiteIndex x, double T, const EventLog& log, double s);

/// Type of (x, T) read off the dual, without running the process forward.
///
/// Ancestors landing on time 0 are visited in hierarchy order. The first
/// one on an occupied site carries its type upward unless its path crosses
/// an arrow that blocks that type (g for specialists, s for generalists);
/// in that case every ancestor hanging below the blocking arrow is discarded
/// and the scan resumes. Empty if nothing gets through. Subtrees that hang
/// from the same arrow are identical, so each is resolved once.
State reconstruct_type(SiteIndex x, double T, const EventLog& log, const Configuration& xi0);

/// The same scan run literally on the full ancestor tree: every branch is
/// materialized with its key, the leaves at time 0 are sorted, and blocked
/// subtrees are pruned by key prefix. The tree grows exponentially in T, so
/// this throws std::length_error once it exceeds `max_branches`.
State reconstruct_type_exhaustive(SiteIndex x, double T, const EventLog& log,
                                  const Configuration& xi0, std::size_t max_branches = 200'000);

/// One piece of the distinguished particle's path: it sits at `site` from
/// dual time `s` until the next piece starts. site == -1 once the dual has
/// died out.
struct PathPiece {
  double s = 0.0;
  SiteIndex site = 0;
};

std::vector<PathPiece> distinguished_path(SiteIndex x, double T, const EventLog& log);

/// Key assignment events of the dual of (x, T), for plotting: the child key
/// was given to `site` at forward `time` through an arrow tip on the parent.
struct DualEdge {
  HierarchyKey parent;
  HierarchyKey child;
  SiteIndex site = 0;
  double time = 0.0;
};

std::vector<DualEdge> dual_tree_edges(SiteIndex x, double T, const EventLog& log);

}  // namespace hmcp
