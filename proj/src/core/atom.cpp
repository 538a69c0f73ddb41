#include "memrep/core/atom.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "memrep/core/error.hpp"

namespace memrep {

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > std::numeric_limits<Symbol>::max()) {
    throw InvalidArgument("alphabet too large");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const std::string& n = names_[i];
    if (n.empty() || n.find('.') != std::string::npos) {
      throw InvalidArgument("invalid symbol name '" + n + "'");
    }
    if (!lookup_.emplace(n, static_cast<Symbol>(i)).second) {
      throw InvalidArgument("duplicate symbol name '" + n + "'");
    }
  }
}

const std::string& Alphabet::name(Symbol s) const {
  if (s >= names_.size()) throw UnknownSymbol(std::to_string(s));
  return names_[s];
}

Symbol Alphabet::index(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) throw UnknownSymbol(std::string(name));
  return it->second;
}

std::string format_word(const Word& w, const Alphabet& alphabet) {
  std::string out;
  for (std::size_t i = 0; i < w.symbols.size(); ++i) {
    if (i > 0) out += '.';
    out += alphabet.name(w.symbols[i]);
  }
  return out;
}

Word parse_word(std::string_view text, const Alphabet& alphabet) {
  Word w;
  if (text.empty()) return w;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view part = text.substr(start, dot == std::string_view::npos ? dot : dot - start);
    w.symbols.push_back(alphabet.index(part));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return w;
}

std::string format_rational(const Rational& r) {
  std::int64_t den = r.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1 || std::max(twos, fives) > 18) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  }
  const int digits = std::max(twos, fives);
  // Scale to an integer number of 10^-digits units.
  __int128 scaled = r.numerator();
  __int128 pow10 = 1;
  for (int i = 0; i < digits; ++i) pow10 *= 10;
  scaled = scaled * pow10 / r.denominator();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  const auto int_part = static_cast<std::uint64_t>(scaled / pow10);
  auto frac = static_cast<std::uint64_t>(scaled % pow10);
  std::string out = (negative ? "-" : "") + std::to_string(int_part);
  if (digits > 0) {
    std::string f = std::to_string(frac);
    f.insert(0, static_cast<std::size_t>(digits) - f.size(), '0');
    out += "." + f;
  }
  return out;
}

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("invalid integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return {parse_int(text.substr(0, slash)), den};
  }
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  const std::size_t dot = text.find('.');
  const std::string_view ip = text.substr(0, dot);
  std::string_view fp = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  while (!fp.empty() && fp.back() == '0') fp.remove_suffix(1);
  if (ip.empty() && fp.empty()) throw ParseError("invalid number '" + std::string(text) + "'");
  if (fp.size() > 18) throw ParseError("too many decimal digits in '" + std::string(text) + "'");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  const std::int64_t whole = ip.empty() ? 0 : parse_int(ip);
  const std::int64_t frac = fp.empty() ? 0 : parse_int(fp);
  Rational r(whole * den + frac, den);
  return negative ? -r : r;
}

std::string to_string(const Atom& atom, const Alphabet& alphabet) {
  if (const auto* w = std::get_if<Word>(&atom)) return format_word(*w, alphabet);
  const auto& p = std::get<Point>(atom);
  std::string out = "[";
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    if (i > 0) out += ',';
    out += format_rational(p.coords[i]);
  }
  return out + "]";
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.symbols < b.symbols;
}

bool canonical_less(const Atom& a, const Atom& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (const auto* w = std::get_if<Word>(&a)) return shortlex_less(*w, std::get<Word>(b));
  return std::get<Point>(a) < std::get<Point>(b);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_value(const Atom& atom) {
  std::uint64_t h = mix64(atom.index());
  if (const auto* w = std::get_if<Word>(&atom)) {
    h = mix64(h ^ w->symbols.size());
    for (Symbol s : w->symbols) h = mix64(h ^ s);
  } else {
    const auto& p = std::get<Point>(atom);
    h = mix64(h ^ p.coords.size());
    for (const Rational& r : p.coords) {
      h = mix64(h ^ static_cast<std::uint64_t>(r.numerator()));
      h = mix64(h ^ static_cast<std::uint64_t>(r.denominator()));
    }
  }
  return h;
}

}  // namespace memrep
