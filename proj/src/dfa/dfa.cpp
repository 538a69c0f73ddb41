#include "memrep/dfa/dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "memrep/core/error.hpp"

namespace memrep::dfa {

Dfa::Dfa(Alphabet alphabet, std::size_t states)
    : alphabet_(std::move(alphabet)), delta_(states * alphabet_.size(), 0), accepting_(states, false) {
  if (states == 0) throw InvalidArgument("a DFA needs at least one state");
}

Dfa Dfa::universal(const Alphabet& alphabet) {
  Dfa d(alphabet, 1);
  d.set_accepting(0, true);
  return d;
}

Dfa Dfa::empty(const Alphabet& alphabet) { return Dfa(alphabet, 1); }

State Dfa::run(const Word& w, State from) const {
  State q = from;
  for (Symbol s : w.symbols) {
    if (s >= alphabet_.size()) throw UnknownSymbol(std::to_string(s));
    q = next(q, s);
  }
  return q;
}

bool Dfa::contains(const Atom& atom) const {
  const auto* w = std::get_if<Word>(&atom);
  return w != nullptr && accepts(*w);
}

Dfa Dfa::canonical() const {
  const std::size_t n = num_states();
  const std::size_t m = alphabet_.size();
  std::vector<State> id(n, UINT32_MAX);
  std::vector<State> order{0};
  id[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Symbol a = 0; a < m; ++a) {
      const State t = next(order[i], a);
      if (id[t] == UINT32_MAX) {
        id[t] = static_cast<State>(order.size());
        order.push_back(t);
      }
    }
  }
  Dfa out(alphabet_, order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.set_accepting(static_cast<State>(i), accepting(order[i]));
    for (Symbol a = 0; a < m; ++a) out.set_transition(static_cast<State>(i), a, id[next(order[i], a)]);
  }
  return out;
}

Dfa Dfa::minimize() const {
  const Dfa d = canonical();
  const std::size_t n = d.num_states();
  const std::size_t m = alphabet_.size();
  // Moore refinement: split blocks by (block, successor blocks) signatures.
  std::vector<std::size_t> block(n);
  for (State q = 0; q < n; ++q) block[q] = d.accepting(q) ? 1 : 0;
  std::size_t blocks = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> sig_id;
    std::vector<std::size_t> next_block(n);
    for (State q = 0; q < n; ++q) {
      std::vector<std::size_t> sig{block[q]};
      for (Symbol a = 0; a < m; ++a) sig.push_back(block[d.next(q, a)]);
      next_block[q] = sig_id.emplace(std::move(sig), sig_id.size()).first->second;
    }
    block = std::move(next_block);
    if (sig_id.size() == blocks) break;
    blocks = sig_id.size();
  }
  Dfa quotient(alphabet_, blocks);
  for (State q = 0; q < n; ++q) {
    const auto b = static_cast<State>(block[q]);
    quotient.set_accepting(b, d.accepting(q));
    for (Symbol a = 0; a < m; ++a) quotient.set_transition(b, a, static_cast<State>(block[d.next(q, a)]));
  }
  // State 0 is numbered first in every round, so its block is 0.
  return quotient.canonical();
}

std::string Dfa::serialize() const { return to_json(minimize()).dump(); }

Dfa product(const Dfa& a, const Dfa& b, ProductOp op) {
  if (!(a.alphabet() == b.alphabet())) throw InvalidArgument("alphabet mismatch in product");
  const std::size_t m = a.alphabet().size();
  std::map<std::pair<State, State>, State> id;
  std::vector<std::pair<State, State>> order{{0, 0}};
  id[{0, 0}] = 0;
  std::vector<std::vector<State>> trans;
  for (std::size_t i = 0; i < order.size(); ++i) {
    trans.emplace_back(m);
    for (Symbol s = 0; s < m; ++s) {
      const std::pair<State, State> t{a.next(order[i].first, s), b.next(order[i].second, s)};
      auto [it, fresh] = id.emplace(t, static_cast<State>(order.size()));
      if (fresh) order.push_back(t);
      trans[i][s] = it->second;
    }
  }
  Dfa out(a.alphabet(), order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const bool x = a.accepting(order[i].first);
    const bool y = b.accepting(order[i].second);
    const bool acc = op == ProductOp::And ? (x && y) : op == ProductOp::Or ? (x || y) : (x != y);
    out.set_accepting(static_cast<State>(i), acc);
    for (Symbol s = 0; s < m; ++s) out.set_transition(static_cast<State>(i), s, trans[i][s]);
  }
  return out;
}

std::optional<Word> shortest_accepted(const Dfa& d) {
  const std::size_t n = d.num_states();
  const std::size_t m = d.alphabet().size();
  std::vector<State> parent(n, UINT32_MAX);
  std::vector<Symbol> via(n, 0);
  std::vector<bool> seen(n, false);
  std::deque<State> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const State q = queue.front();
    queue.pop_front();
    if (d.accepting(q)) {
      Word w;
      for (State v = q; parent[v] != UINT32_MAX; v = parent[v]) w.symbols.push_back(via[v]);
      std::reverse(w.symbols.begin(), w.symbols.end());
      return w;
    }
    for (Symbol s = 0; s < m; ++s) {
      const State t = d.next(q, s);
      if (seen[t]) continue;
      seen[t] = true;
      parent[t] = q;
      via[t] = s;
      queue.push_back(t);
    }
  }
  return std::nullopt;
}

bool is_empty(const Dfa& d) { return !shortest_accepted(d).has_value(); }

bool equivalent(const Dfa& a, const Dfa& b) { return is_empty(symmetric_difference(a, b)); }

std::optional<Word> sample_accepted(const Dfa& d, std::size_t slack, std::mt19937_64& rng) {
  const auto shortest = shortest_accepted(d);
  if (!shortest) return std::nullopt;
  const std::size_t lmin = shortest->size();
  const std::size_t lmax = lmin + slack;
  const std::size_t n = d.num_states();
  const std::size_t m = d.alphabet().size();
  // count[l][q]: accepted words of length l read from q. Doubles keep long
  // bands from overflowing; the draw stays uniform up to rounding.
  std::vector<std::vector<double>> count(lmax + 1, std::vector<double>(n, 0.0));
  for (State q = 0; q < n; ++q) count[0][q] = d.accepting(q) ? 1.0 : 0.0;
  for (std::size_t l = 1; l <= lmax; ++l) {
    for (State q = 0; q < n; ++q) {
      double c = 0.0;
      for (Symbol s = 0; s < m; ++s) c += count[l - 1][d.next(q, s)];
      count[l][q] = c;
    }
  }
  double total = 0.0;
  for (std::size_t l = lmin; l <= lmax; ++l) total += count[l][0];
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r = unit(rng) * total;
  std::size_t len = lmin;
  for (std::size_t l = lmin; l <= lmax; ++l) {
    if (count[l][0] <= 0.0) continue;
    len = l;
    if (r < count[l][0]) break;
    r -= count[l][0];
  }
  Word w;
  State q = 0;
  for (std::size_t remaining = len; remaining > 0; --remaining) {
    double pick = unit(rng) * count[remaining][q];
    Symbol chosen = 0;
    bool found = false;
    for (Symbol s = 0; s < m; ++s) {
      const double c = count[remaining - 1][d.next(q, s)];
      if (c <= 0.0) continue;
      chosen = s;
      found = true;
      if (pick < c) break;
      pick -= c;
    }
    if (!found) break;
    w.symbols.push_back(chosen);
    q = d.next(q, chosen);
  }
  return w;
}

Word sample_word(const Alphabet& alphabet, std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  const double m = static_cast<double>(alphabet.size());
  std::vector<double> weight;
  double w = 1.0;
  for (std::size_t l = 0; l <= hi; ++l) {
    if (l >= lo) weight.push_back(w);
    w *= m;
  }
  std::discrete_distribution<std::size_t> len_dist(weight.begin(), weight.end());
  const std::size_t len = lo + len_dist(rng);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  Word out;
  for (std::size_t i = 0; i < len; ++i) out.symbols.push_back(static_cast<Symbol>(sym(rng)));
  return out;
}

std::vector<Word> all_words(const Alphabet& alphabet, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() == max_len) continue;
    for (Symbol s = 0; s < alphabet.size(); ++s) {
      Word w = out[i];
      w.symbols.push_back(s);
      out.push_back(std::move(w));
    }
  }
  return out;
}

nlohmann::json to_json(const Dfa& d) {
  nlohmann::json trans = nlohmann::json::array();
  nlohmann::json acc = nlohmann::json::array();
  for (State q = 0; q < d.num_states(); ++q) {
    if (d.accepting(q)) acc.push_back(q);
    for (Symbol s = 0; s < d.alphabet().size(); ++s) {
      trans.push_back({q, d.alphabet().name(s), d.next(q, s)});
    }
  }
  return {{"states", d.num_states()},
          {"alphabet", d.alphabet().names()},
          {"transitions", trans},
          {"initial", 0},
          {"accepting", acc}};
}

Dfa dfa_from_json(const nlohmann::json& j) {
  try {
    const Alphabet alphabet(j.at("alphabet").get<std::vector<std::string>>());
    const auto states = j.at("states").get<std::size_t>();
    if (j.value("initial", 0) != 0) throw ParseError("initial state must be 0");
    Dfa d(alphabet, states);
    std::vector<bool> defined(states * alphabet.size(), false);
    for (const auto& t : j.at("transitions")) {
      const auto from = t.at(0).get<State>();
      const Symbol s = alphabet.index(t.at(1).get<std::string>());
      const auto to = t.at(2).get<State>();
      if (from >= states || to >= states) throw ParseError("transition state out of range");
      d.set_transition(from, s, to);
      defined[from * alphabet.size() + s] = true;
    }
    if (std::find(defined.begin(), defined.end(), false) != defined.end()) {
      throw ParseError("transition function is not total");
    }
    for (const auto& q : j.at("accepting")) {
      const auto s = q.get<State>();
      if (s >= states) throw ParseError("accepting state out of range");
      d.set_accepting(s, true);
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed DFA: ") + e.what());
  }
}

std::string to_dot(const Dfa& d) {
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n  start -> q0;\n";
  for (State q = 0; q < d.num_states(); ++q) {
    out << "  q" << q << " [shape=" << (d.accepting(q) ? "doublecircle" : "circle") << "];\n";
  }
  for (State q = 0; q < d.num_states(); ++q) {
    std::map<State, std::string> labels;
    for (Symbol s = 0; s < d.alphabet().size(); ++s) {
      auto& l = labels[d.next(q, s)];
      if (!l.empty()) l += ",";
      l += d.alphabet().name(s);
    }
    for (const auto& [to, label] : labels) out << "  q" << q << " -> q" << to << " [label=\"" << label << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace memrep::dfa
