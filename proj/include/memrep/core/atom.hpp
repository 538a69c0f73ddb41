#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

namespace memrep {

using Rational = boost::rational<std::int64_t>;
using Symbol = std::uint16_t;

/// Finite alphabet with named symbols. Names must be non-empty and must not
/// contain '.', which separates symbols in serialized words.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  static Alphabet binary() { return Alphabet({"0", "1"}); }

  std::size_t size() const { return names_.size(); }
  const std::string& name(Symbol s) const;
  Symbol index(std::string_view name) const;  // throws UnknownSymbol
  bool contains(std::string_view name) const { return lookup_.count(std::string(name)) != 0; }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const Alphabet& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Symbol> lookup_;
};

struct Word {
  std::vector<Symbol> symbols;

  std::size_t size() const { return symbols.size(); }
  auto operator<=>(const Word&) const = default;
};

struct Point {
  std::vector<Rational> coords;

  std::size_t dim() const { return coords.size(); }
  bool operator==(const Point&) const = default;
  bool operator<(const Point& other) const { return coords < other.coords; }
};

/// A universe element: a word (automata domain) or a point of the unit cube.
using Atom = std::variant<Word, Point>;

inline bool is_word(const Atom& a) { return std::holds_alternative<Word>(a); }
inline bool is_point(const Atom& a) { return std::holds_alternative<Point>(a); }

/// "0.1.1" style; the empty word serializes to "".
std::string format_word(const Word& w, const Alphabet& alphabet);
Word parse_word(std::string_view text, const Alphabet& alphabet);

/// Finite decimals print as decimals ("0.25"), everything else as "n/d".
std::string format_rational(const Rational& r);
Rational parse_rational(std::string_view text);

/// Canonical text of an atom. Points render as "[0.25,1/3]".
std::string to_string(const Atom& atom, const Alphabet& alphabet);

/// Shortlex order on words: shorter first, then lexicographic by symbol id.
bool shortlex_less(const Word& a, const Word& b);
/// Shortlex on words, coordinatewise lexicographic on points, words first.
bool canonical_less(const Atom& a, const Atom& b);

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_value(const Atom& atom);

}  // namespace memrep

template <>
struct std::hash<memrep::Word> {
  std::size_t operator()(const memrep::Word& w) const noexcept {
    return static_cast<std::size_t>(memrep::hash_value(memrep::Atom(w)));
  }
};

template <>
struct std::hash<memrep::Point> {
  std::size_t operator()(const memrep::Point& p) const noexcept {
    return static_cast<std::size_t>(memrep::hash_value(memrep::Atom(p)));
  }
};
