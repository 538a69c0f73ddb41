#pragma once

#include <concepts>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memrep/core/knowledge_base.hpp"

namespace memrep {

template <class C>
concept ConceptLike = requires(const C& c, const Atom& a) {
  { c.contains(a) } -> std::convertible_to<bool>;
};

/// x ⪯ y implies φ(x) <= φ(y); Equiv forces equality, Incomparable nothing.
template <ConceptLike C>
bool memrep_holds(std::span<const PrefFact> order, const C& phi) {
  for (const PrefFact& p : order) {
    if (p.label == PrefLabel::Incomparable) continue;
    const bool x = phi.contains(p.lhs);
    const bool y = phi.contains(p.rhs);
    switch (p.label) {
      case PrefLabel::Less:
        if (x && !y) return false;
        break;
      case PrefLabel::Greater:
        if (y && !x) return false;
        break;
      case PrefLabel::Equiv:
        if (x != y) return false;
        break;
      case PrefLabel::Incomparable:
        break;
    }
  }
  return true;
}

template <ConceptLike C>
bool is_consistent(const C& phi, const KnowledgeBase& kb) {
  for (const Entry& e : kb.entries()) {
    if (!e.active) continue;
    if (e.is_mem()) {
      if (phi.contains(e.mem().atom) != (e.mem().label == MemLabel::Member)) return false;
    } else if (!memrep_holds(std::span<const PrefFact>(&e.pref(), 1), phi)) {
      return false;
    }
  }
  return true;
}

/// Eager filter for explicit classes.
template <ConceptLike C>
std::vector<C> consistent_filter(std::span<const C> cls, const KnowledgeBase& kb) {
  std::vector<C> out;
  for (const C& c : cls) {
    if (is_consistent(c, kb)) out.push_back(c);
  }
  return out;
}

/// A finite set of atoms, or its complement.
class ExplicitConcept {
 public:
  ExplicitConcept() = default;
  explicit ExplicitConcept(std::set<Atom> members, bool complement = false)
      : members_(std::move(members)), complement_(complement) {}

  static ExplicitConcept top() { return ExplicitConcept({}, true); }
  static ExplicitConcept bottom() { return ExplicitConcept({}, false); }

  bool contains(const Atom& a) const { return (members_.count(a) != 0) != complement_; }
  std::string serialize(const Alphabet& alphabet) const {
    std::string out = complement_ ? "~{" : "{";
    bool first = true;
    for (const Atom& a : members_) {
      if (!first) out += ',';
      first = false;
      out += to_string(a, alphabet);
    }
    return out + "}";
  }
  bool operator==(const ExplicitConcept&) const = default;

 private:
  std::set<Atom> members_;
  bool complement_ = false;
};

}  // namespace memrep
