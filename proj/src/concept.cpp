#include "memrep/concept.hpp"

#include "memrep/core/error.hpp"

namespace memrep {

Concept::Concept(dfa::Dfa d) : repr_(d.minimize()) { key_ = dfa::to_json(std::get<dfa::Dfa>(repr_)).dump(); }

Concept::Concept(monotone::Threshold t) : repr_(std::move(t)) { key_ = std::get<monotone::Threshold>(repr_).serialize(); }

bool Concept::contains(const Atom& atom) const {
  return std::visit([&](const auto& c) { return c.contains(atom); }, repr_);
}

nlohmann::json Concept::to_json() const {
  if (is_dfa()) return {{"kind", "dfa"}, {"dfa", dfa::to_json(dfa())}};
  return {{"kind", "threshold"}, {"theta", atom_to_json(Atom(threshold().theta()), Alphabet{})}};
}

Concept concept_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "dfa") return Concept(dfa::dfa_from_json(j.at("dfa")));
  if (kind == "threshold") {
    return Concept(monotone::Threshold(std::get<Point>(atom_from_json(j.at("theta"), Alphabet{}))));
  }
  throw ParseError("unknown concept kind '" + kind + "'");
}

}  // namespace memrep
