#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "memrep/dfa/dfa.hpp"
#include "memrep/monotone/grid.hpp"

namespace memrep {

/// A concept of either supported class. Equality is language equality:
/// DFAs are compared through their minimal canonical form.
class Concept {
 public:
  explicit Concept(dfa::Dfa d);
  explicit Concept(monotone::Threshold t);

  bool contains(const Atom& atom) const;
  /// Canonical text; equal concepts give equal keys.
  const std::string& key() const { return key_; }
  nlohmann::json to_json() const;

  bool is_dfa() const { return std::holds_alternative<dfa::Dfa>(repr_); }
  const dfa::Dfa& dfa() const { return std::get<dfa::Dfa>(repr_); }
  const monotone::Threshold& threshold() const { return std::get<monotone::Threshold>(repr_); }

  bool operator==(const Concept& other) const { return key_ == other.key_; }
  bool operator<(const Concept& other) const { return key_ < other.key_; }

 private:
  std::variant<dfa::Dfa, monotone::Threshold> repr_;
  std::string key_;
};

Concept concept_from_json(const nlohmann::json& j);

}  // namespace memrep
