#include "memrep/core/hasse.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace memrep {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::StrictCycle:
      return "strict-cycle";
    case ViolationKind::IncomparableEntailed:
      return "incomparable-entailed";
    case ViolationKind::ConflictingLabels:
      return "conflicting-labels";
    case ViolationKind::MemRep:
      return "memrep";
    case ViolationKind::Unsatisfiable:
      return "unsatisfiable";
  }
  return "?";
}

std::vector<std::size_t> ViolationReport::entry_set() const {
  std::set<std::size_t> all;
  for (const auto& v : violations) all.insert(v.entries.begin(), v.entries.end());
  return {all.begin(), all.end()};
}

bool ViolationReport::has_preorder_violation() const {
  return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
    return v.kind == ViolationKind::StrictCycle || v.kind == ViolationKind::IncomparableEntailed;
  });
}

namespace {

// Atom graph over active entries. An arc u -> v means u is preferred or
// equivalent to v and carries the entry that produced it.
struct Arc {
  std::size_t to;
  std::size_t entry;
  bool strict;
};

struct AtomGraph {
  std::vector<Atom> atoms;
  std::unordered_map<Atom, std::size_t> id;
  std::vector<std::vector<Arc>> out;

  std::size_t intern(const Atom& a) {
    auto [it, fresh] = id.emplace(a, atoms.size());
    if (fresh) {
      atoms.push_back(a);
      out.emplace_back();
    }
    return it->second;
  }

  explicit AtomGraph(const KnowledgeBase& kb) {
    for (const Entry& e : kb.entries()) {
      if (!e.active) continue;
      if (e.is_mem()) {
        intern(e.mem().atom);
        continue;
      }
      const PrefFact& p = e.pref();
      const std::size_t l = intern(p.lhs);
      const std::size_t r = intern(p.rhs);
      if (p.label == PrefLabel::Less) {
        out[r].push_back({l, e.index, true});
      } else if (p.label == PrefLabel::Equiv) {
        out[l].push_back({r, e.index, false});
        out[r].push_back({l, e.index, false});
      }
    }
  }

  // Entries along a shortest path from -> to, or nullopt. from == to yields
  // the empty path.
  std::optional<std::vector<std::size_t>> shortest_path(std::size_t from, std::size_t to) const {
    std::vector<std::ptrdiff_t> parent_arc_entry(atoms.size(), -1);
    std::vector<std::size_t> parent(atoms.size(), SIZE_MAX);
    std::vector<bool> seen(atoms.size(), false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (u == to) break;
      for (const Arc& a : out[u]) {
        if (seen[a.to]) continue;
        seen[a.to] = true;
        parent[a.to] = u;
        parent_arc_entry[a.to] = static_cast<std::ptrdiff_t>(a.entry);
        queue.push_back(a.to);
      }
    }
    if (!seen[to]) return std::nullopt;
    std::vector<std::size_t> path;
    for (std::size_t v = to; v != from; v = parent[v]) {
      path.push_back(static_cast<std::size_t>(parent_arc_entry[v]));
    }
    return path;
  }
};

Violation make_violation(ViolationKind kind, std::vector<std::size_t> entries) {
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  return {kind, std::move(entries)};
}

void add_unique(std::vector<Violation>& out, Violation v) {
  for (const auto& existing : out) {
    if (existing.kind == v.kind && existing.entries == v.entries) return;
  }
  out.push_back(std::move(v));
}

std::vector<Violation> preorder_violations(const KnowledgeBase& kb, const AtomGraph& g) {
  std::vector<Violation> out;
  for (const Entry& e : kb.entries()) {
    if (!e.active || e.is_mem()) continue;
    const PrefFact& p = e.pref();
    const std::size_t l = g.id.at(p.lhs);
    const std::size_t r = g.id.at(p.rhs);
    if (p.label == PrefLabel::Less) {
      // Arc r -> l; any path back from l to r closes a strict cycle.
      if (auto path = g.shortest_path(l, r)) {
        path->push_back(e.index);
        add_unique(out, make_violation(ViolationKind::StrictCycle, std::move(*path)));
      }
    } else if (p.label == PrefLabel::Incomparable) {
      for (auto [from, to] : {std::pair{l, r}, std::pair{r, l}}) {
        if (auto path = g.shortest_path(from, to)) {
          path->push_back(e.index);
          add_unique(out, make_violation(ViolationKind::IncomparableEntailed, std::move(*path)));
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace

ViolationReport detect_violations(const KnowledgeBase& kb) {
  const AtomGraph g(kb);
  ViolationReport report;
  report.violations = preorder_violations(kb, g);

  std::vector<std::optional<std::size_t>> member(g.atoms.size());
  std::vector<std::optional<std::size_t>> nonmember(g.atoms.size());
  for (const Entry& e : kb.entries()) {
    if (!e.active || !e.is_mem()) continue;
    const std::size_t a = g.id.at(e.mem().atom);
    auto& slot = e.mem().label == MemLabel::Member ? member[a] : nonmember[a];
    if (!slot) slot = e.index;
  }
  for (std::size_t a = 0; a < g.atoms.size(); ++a) {
    if (member[a] && nonmember[a]) {
      report.violations.push_back(
          make_violation(ViolationKind::ConflictingLabels, {*member[a], *nonmember[a]}));
    }
  }
  // A non-member must not be preferred (or equivalent) to a member.
  for (std::size_t y = 0; y < g.atoms.size(); ++y) {
    if (!nonmember[y]) continue;
    for (std::size_t x = 0; x < g.atoms.size(); ++x) {
      if (x == y || !member[x]) continue;
      if (auto path = g.shortest_path(y, x)) {
        path->push_back(*nonmember[y]);
        path->push_back(*member[x]);
        report.violations.push_back(make_violation(ViolationKind::MemRep, std::move(*path)));
      }
    }
  }
  return report;
}

std::optional<std::size_t> HasseDiagram::node_of(const Atom& atom) const {
  auto it = index.find(atom);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

bool HasseDiagram::prefers(const Atom& a, const Atom& b) const {
  auto u = node_of(a);
  auto v = node_of(b);
  return u && v && reach[*u][*v];
}

std::vector<std::pair<Atom, Atom>> HasseDiagram::strict_pairs() const {
  // Closure rebuilt from the reduced edges alone.
  const std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (auto [u, v] : edges) succ[u].push_back(v);
  std::vector<std::pair<Atom, Atom>> out;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack(succ[s].begin(), succ[s].end());
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = true;
      for (std::size_t w : succ[v]) stack.push_back(w);
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (!seen[t]) continue;
      for (const Atom& a : nodes[s]) {
        for (const Atom& b : nodes[t]) out.emplace_back(a, b);
      }
    }
  }
  return out;
}

std::variant<HasseDiagram, ViolationReport> build_hasse(const KnowledgeBase& kb) {
  const AtomGraph g(kb);
  ViolationReport report;
  report.violations = preorder_violations(kb, g);
  if (!report.empty()) return report;

  // Without strict cycles, equivalence classes are the components of the
  // Equiv arcs.
  const std::size_t n = g.atoms.size();
  std::vector<std::size_t> comp(n, SIZE_MAX);
  HasseDiagram h;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != SIZE_MAX) continue;
    const std::size_t c = h.nodes.size();
    h.nodes.emplace_back();
    std::vector<std::size_t> stack{s};
    comp[s] = c;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      h.nodes[c].push_back(g.atoms[u]);
      for (const Arc& a : g.out[u]) {
        if (!a.strict && comp[a.to] == SIZE_MAX) {
          comp[a.to] = c;
          stack.push_back(a.to);
        }
      }
    }
    std::sort(h.nodes[c].begin(), h.nodes[c].end());
  }
  const std::size_t m = h.nodes.size();
  std::vector<std::vector<bool>> direct(m, std::vector<bool>(m, false));
  for (std::size_t u = 0; u < n; ++u) {
    for (const Arc& a : g.out[u]) {
      if (a.strict) direct[comp[u]][comp[a.to]] = true;
    }
  }
  // Topological order, then closure in reverse order.
  std::vector<int> indeg(m, 0);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < m; ++v) indeg[v] += direct[u][v] ? 1 : 0;
  }
  std::vector<std::size_t> topo;
  for (std::size_t u = 0; u < m; ++u) {
    if (indeg[u] == 0) topo.push_back(u);
  }
  for (std::size_t i = 0; i < topo.size(); ++i) {
    for (std::size_t v = 0; v < m; ++v) {
      if (direct[topo[i]][v] && --indeg[v] == 0) topo.push_back(v);
    }
  }
  h.reach.assign(m, std::vector<bool>(m, false));
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t u = *it;
    for (std::size_t v = 0; v < m; ++v) {
      if (!direct[u][v]) continue;
      h.reach[u][v] = true;
      for (std::size_t w = 0; w < m; ++w) {
        if (h.reach[v][w]) h.reach[u][w] = true;
      }
    }
  }
  // Keep u -> v only if no other successor of u reaches v.
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = 0; v < m; ++v) {
      if (!direct[u][v]) continue;
      bool implied = false;
      for (std::size_t w = 0; w < m && !implied; ++w) {
        implied = w != v && direct[u][w] && h.reach[w][v];
      }
      if (!implied) h.edges.emplace_back(u, v);
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    for (const Atom& a : h.nodes[c]) h.index.emplace(a, c);
  }
  return h;
}

}  // namespace memrep
