#include "memrep/core/knowledge_base.hpp"

#include <algorithm>

#include "memrep/core/error.hpp"

namespace memrep {

std::string_view to_token(MemLabel label) { return label == MemLabel::Member ? "in" : "out"; }

std::string_view to_token(PrefLabel label) {
  switch (label) {
    case PrefLabel::Less:
      return "<";
    case PrefLabel::Greater:
      return ">";
    case PrefLabel::Equiv:
      return "=";
    case PrefLabel::Incomparable:
      return "||";
  }
  return "?";
}

MemLabel parse_mem_label(std::string_view token) {
  if (token == "in") return MemLabel::Member;
  if (token == "out") return MemLabel::NonMember;
  throw ParseError("invalid membership label '" + std::string(token) + "'");
}

PrefLabel parse_pref_label(std::string_view token) {
  if (token == "<") return PrefLabel::Less;
  if (token == ">") return PrefLabel::Greater;
  if (token == "=") return PrefLabel::Equiv;
  if (token == "||") return PrefLabel::Incomparable;
  throw ParseError("invalid preference label '" + std::string(token) + "'");
}

PrefFact normalize(Atom lhs, Atom rhs, PrefLabel label) {
  if (label == PrefLabel::Greater) return {std::move(rhs), std::move(lhs), PrefLabel::Less};
  if (label != PrefLabel::Less && rhs < lhs) std::swap(lhs, rhs);
  return {std::move(lhs), std::move(rhs), label};
}

std::optional<std::size_t> KnowledgeBase::find_active(const Fact& fact) const {
  const Atom& key = std::holds_alternative<MemFact>(fact) ? std::get<MemFact>(fact).atom
                                                         : std::get<PrefFact>(fact).lhs;
  auto it = by_atom_.find(key);
  if (it == by_atom_.end()) return std::nullopt;
  for (std::size_t i : it->second) {
    if (entries_[i].active && entries_[i].fact == fact) return i;
  }
  return std::nullopt;
}

std::size_t KnowledgeBase::add(const Fact& fact, Source source) {
  Fact f = fact;
  if (auto* p = std::get_if<PrefFact>(&f)) *p = normalize(p->lhs, p->rhs, p->label);
  if (auto existing = find_active(f)) return *existing;
  const std::size_t index = entries_.size();
  entries_.push_back(Entry{index, f, source, true});
  if (const auto* m = std::get_if<MemFact>(&f)) {
    by_atom_[m->atom].push_back(index);
  } else {
    const auto& p = std::get<PrefFact>(f);
    by_atom_[p.lhs].push_back(index);
    if (p.rhs != p.lhs) by_atom_[p.rhs].push_back(index);
  }
  return index;
}

std::size_t KnowledgeBase::add_membership(Atom atom, MemLabel label, Source source) {
  return add(MemFact{std::move(atom), label}, source);
}

std::size_t KnowledgeBase::add_preference(Atom lhs, Atom rhs, PrefLabel label, Source source) {
  return add(normalize(std::move(lhs), std::move(rhs), label), source);
}

std::size_t KnowledgeBase::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.active; }));
}

std::optional<MemLabel> KnowledgeBase::label_of(const Atom& atom) const {
  auto it = by_atom_.find(atom);
  if (it == by_atom_.end()) return std::nullopt;
  for (std::size_t i : it->second) {
    const Entry& e = entries_[i];
    if (e.active && e.is_mem()) return e.mem().label;
  }
  return std::nullopt;
}

std::vector<MemFact> KnowledgeBase::active_mem() const {
  std::vector<MemFact> out;
  for (const Entry& e : entries_) {
    if (e.active && e.is_mem()) out.push_back(e.mem());
  }
  return out;
}

std::vector<PrefFact> KnowledgeBase::active_pref() const {
  std::vector<PrefFact> out;
  for (const Entry& e : entries_) {
    if (e.active && !e.is_mem()) out.push_back(e.pref());
  }
  return out;
}

nlohmann::json atom_to_json(const Atom& atom, const Alphabet& alphabet) {
  if (const auto* w = std::get_if<Word>(&atom)) return format_word(*w, alphabet);
  nlohmann::json arr = nlohmann::json::array();
  for (const Rational& r : std::get<Point>(atom).coords) arr.push_back(format_rational(r));
  return arr;
}

Atom atom_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  if (j.is_string()) return parse_word(j.get<std::string>(), alphabet);
  if (!j.is_array()) throw ParseError("atom must be a string or an array");
  Point p;
  for (const auto& c : j) {
    if (c.is_string()) {
      p.coords.push_back(parse_rational(c.get<std::string>()));
    } else if (c.is_number_integer()) {
      p.coords.emplace_back(c.get<std::int64_t>());
    } else if (c.is_number()) {
      p.coords.push_back(parse_rational(c.dump()));
    } else {
      throw ParseError("point coordinate must be a number or a string");
    }
  }
  return p;
}

nlohmann::json to_json(const KnowledgeBase& kb, const Alphabet& alphabet) {
  nlohmann::json mem = nlohmann::json::array();
  nlohmann::json pref = nlohmann::json::array();
  for (const Entry& e : kb.entries()) {
    if (!e.active) continue;
    if (e.is_mem()) {
      mem.push_back({atom_to_json(e.mem().atom, alphabet), to_token(e.mem().label)});
    } else {
      const PrefFact& p = e.pref();
      pref.push_back({atom_to_json(p.lhs, alphabet), atom_to_json(p.rhs, alphabet), to_token(p.label)});
    }
  }
  return {{"mem", mem}, {"pref", pref}};
}

KnowledgeBase kb_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  KnowledgeBase kb;
  try {
    for (const auto& m : j.value("mem", nlohmann::json::array())) {
      kb.add_membership(atom_from_json(m.at(0), alphabet), parse_mem_label(m.at(1).get<std::string>()));
    }
    for (const auto& p : j.value("pref", nlohmann::json::array())) {
      kb.add_preference(atom_from_json(p.at(0), alphabet), atom_from_json(p.at(1), alphabet),
                        parse_pref_label(p.at(2).get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed knowledge base: ") + e.what());
  }
  return kb;
}

}  // namespace memrep
