#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "memrep/core/knowledge_base.hpp"

namespace memrep {

enum class ViolationKind : std::uint8_t {
  StrictCycle,       // a cycle of preferences containing a strict edge
  IncomparableEntailed,  // x || y while the other entries entail a comparison
  ConflictingLabels, // the same atom labeled in and out
  MemRep,            // y preferred over x, y out, x in
  Unsatisfiable,     // no concept of the searched sizes fits these entries
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<std::size_t> entries;  // sorted entry indices
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool empty() const { return violations.empty(); }
  /// Union of all supporting entries, sorted.
  std::vector<std::size_t> entry_set() const;
  bool has_preorder_violation() const;
};

/// Equivalence classes of atoms with strict edges pointing from the
/// preferred class to the less preferred one, transitively reduced.
struct HasseDiagram {
  std::vector<std::vector<Atom>> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::optional<std::size_t> node_of(const Atom& atom) const;
  /// True when a ≻ b is entailed.
  bool prefers(const Atom& a, const Atom& b) const;
  /// Every entailed strict pair (preferred, other), obtained by re-expanding
  /// the reduced edges.
  std::vector<std::pair<Atom, Atom>> strict_pairs() const;

  std::unordered_map<Atom, std::size_t> index;
  std::vector<std::vector<bool>> reach;  // reach[u][v]: path of length >= 1
};

std::variant<HasseDiagram, ViolationReport> build_hasse(const KnowledgeBase& kb);

ViolationReport detect_violations(const KnowledgeBase& kb);

}  // namespace memrep
