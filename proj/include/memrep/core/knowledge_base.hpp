#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "memrep/core/atom.hpp"
#include "memrep/core/labels.hpp"

namespace memrep {

/// Where an entry came from. Counterexamples and prior facts are trusted:
/// error recovery never drops them.
enum class Source : std::uint8_t { Query, Counterexample, Prior };

inline bool trusted(Source s) { return s != Source::Query; }

struct MemFact {
  Atom atom;
  MemLabel label;
  bool operator==(const MemFact&) const = default;
};

/// Normalized: label is never Greater; symmetric labels have lhs <= rhs.
struct PrefFact {
  Atom lhs;
  Atom rhs;
  PrefLabel label;
  bool operator==(const PrefFact&) const = default;
};

using Fact = std::variant<MemFact, PrefFact>;

PrefFact normalize(Atom lhs, Atom rhs, PrefLabel label);

struct Entry {
  std::size_t index = 0;
  Fact fact;
  Source source = Source::Query;
  bool active = true;

  bool is_mem() const { return std::holds_alternative<MemFact>(fact); }
  const MemFact& mem() const { return std::get<MemFact>(fact); }
  const PrefFact& pref() const { return std::get<PrefFact>(fact); }
};

/// Accumulated membership and preference labels. Entry indices are the
/// acquisition order and never change; deactivated entries are ignored by
/// every consumer but stay in the log.
class KnowledgeBase {
 public:
  /// Re-adding an identical active fact returns the existing index.
  std::size_t add_membership(Atom atom, MemLabel label, Source source = Source::Query);
  std::size_t add_preference(Atom lhs, Atom rhs, PrefLabel label, Source source = Source::Query);
  std::size_t add(const Fact& fact, Source source = Source::Query);

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(std::size_t index) const { return entries_.at(index); }
  std::size_t size() const { return entries_.size(); }
  std::size_t active_count() const;

  void set_active(std::size_t index, bool active) { entries_.at(index).active = active; }

  /// First active label for the atom, if any.
  std::optional<MemLabel> label_of(const Atom& atom) const;

  std::vector<MemFact> active_mem() const;
  std::vector<PrefFact> active_pref() const;

 private:
  std::optional<std::size_t> find_active(const Fact& fact) const;

  std::vector<Entry> entries_;
  std::unordered_map<Atom, std::vector<std::size_t>> by_atom_;
};

nlohmann::json atom_to_json(const Atom& atom, const Alphabet& alphabet);
Atom atom_from_json(const nlohmann::json& j, const Alphabet& alphabet);

/// {"mem": [[atom, "in"|"out"], ...], "pref": [[a, b, "<"|"="|"||"], ...]}
/// over active entries.
nlohmann::json to_json(const KnowledgeBase& kb, const Alphabet& alphabet);
KnowledgeBase kb_from_json(const nlohmann::json& j, const Alphabet& alphabet);

}  // namespace memrep
