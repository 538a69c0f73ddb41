#include "memrep/dfa/encoding.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace memrep::dfa {

using sat::Lit;

PrefixTree::PrefixTree(std::size_t alphabet_size) : alphabet_size(alphabet_size) {
  nodes.push_back(Node{-1, 0, 0, std::vector<std::int32_t>(alphabet_size, -1), std::nullopt});
}

std::size_t PrefixTree::insert(const Word& w) {
  std::size_t v = 0;
  for (Symbol s : w.symbols) {
    if (s >= alphabet_size) throw UnknownSymbol(std::to_string(s));
    if (nodes[v].children[s] < 0) {
      nodes[v].children[s] = static_cast<std::int32_t>(nodes.size());
      nodes.push_back(Node{static_cast<std::int32_t>(v), s, nodes[v].depth + 1,
                           std::vector<std::int32_t>(alphabet_size, -1), std::nullopt});
    }
    v = static_cast<std::size_t>(nodes[v].children[s]);
  }
  return v;
}

std::optional<std::size_t> PrefixTree::find(const Word& w) const {
  std::size_t v = 0;
  for (Symbol s : w.symbols) {
    if (s >= alphabet_size || nodes[v].children[s] < 0) return std::nullopt;
    v = static_cast<std::size_t>(nodes[v].children[s]);
  }
  return v;
}

namespace {

const Word& as_word(const Atom& a) {
  const auto* w = std::get_if<Word>(&a);
  if (w == nullptr) throw InvalidArgument("the DFA class only accepts word atoms");
  return *w;
}

}  // namespace

PrefixTree build_prefix_tree(const KnowledgeBase& kb, std::size_t alphabet_size) {
  PrefixTree tree(alphabet_size);
  for (const Entry& e : kb.entries()) {
    if (!e.active) continue;
    if (e.is_mem()) {
      auto& node = tree.nodes[tree.insert(as_word(e.mem().atom))];
      if (!node.label) node.label = e.mem().label;
    } else {
      tree.insert(as_word(e.pref().lhs));
      tree.insert(as_word(e.pref().rhs));
    }
  }
  return tree;
}

SatEncoding::SatEncoding(Alphabet alphabet, std::size_t k, std::uint64_t seed, EncodingOptions options)
    : alphabet_(std::move(alphabet)), k_(k), options_(options), solver_(seed), tree_(alphabet_.size()) {
  if (k_ == 0) throw InvalidArgument("k must be at least 1");
  const std::size_t m = alphabet_.size();
  for (std::size_t i = 0; i < k_; ++i) z_.push_back(solver_.new_var());
  y_.resize(k_ * m * k_);
  for (auto& v : y_) v = solver_.new_var();
  for (std::size_t i = 0; i < k_; ++i) {
    for (Symbol a = 0; a < m; ++a) {
      std::vector<Lit> alo;
      for (std::size_t j = 0; j < k_; ++j) {
        alo.push_back(y(i, a, j));
        for (std::size_t j2 = j + 1; j2 < k_; ++j2) add({~y(i, a, j), ~y(i, a, j2)});
      }
      add(alo);
    }
  }
  // Root node.
  for (std::size_t i = 0; i < k_; ++i) x_.push_back(solver_.new_var());
  add({x(0, 0)});
  for (std::size_t i = 1; i < k_; ++i) add({~x(0, i)});
  if (options_.symmetry_breaking) add_symmetry_breaking();
}

void SatEncoding::add(std::vector<Lit> clause) {
  solver_.add_clause(clause);
  clauses_.push_back(std::move(clause));
}

std::size_t SatEncoding::node(const Word& w) {
  const std::size_t before = tree_.nodes.size();
  const std::size_t v = tree_.insert(w);
  for (std::size_t n = before; n < tree_.nodes.size(); ++n) {
    for (std::size_t i = 0; i < k_; ++i) x_.push_back(solver_.new_var());
    std::vector<Lit> alo;
    for (std::size_t i = 0; i < k_; ++i) {
      alo.push_back(x(n, i));
      for (std::size_t j = i + 1; j < k_; ++j) add({~x(n, i), ~x(n, j)});
    }
    add(alo);
    const auto p = static_cast<std::size_t>(tree_.nodes[n].parent);
    const Symbol a = tree_.nodes[n].symbol;
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) {
        add({~x(p, i), ~x(n, j), y(i, a, j)});
        add({~x(p, i), ~y(i, a, j), x(n, j)});
      }
    }
  }
  return v;
}

void SatEncoding::add_preference(Lit act, std::size_t lower, std::size_t upper) {
  // lower ⪯ upper: accepting lower forces accepting upper.
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      add({~act, ~x(lower, j), ~x(upper, i), ~z(j), z(i)});
    }
  }
}

void SatEncoding::encode_entry(const Entry& e) {
  const Lit act = Lit::pos(solver_.new_var());
  if (activation_.size() <= e.index) activation_.resize(e.index + 1);
  activation_[e.index] = act;
  if (e.is_mem()) {
    const std::size_t v = node(as_word(e.mem().atom));
    const bool member = e.mem().label == MemLabel::Member;
    for (std::size_t i = 0; i < k_; ++i) add({~act, ~x(v, i), member ? z(i) : ~z(i)});
    return;
  }
  const PrefFact& p = e.pref();
  const std::size_t l = node(as_word(p.lhs));
  const std::size_t r = node(as_word(p.rhs));
  if (p.label == PrefLabel::Less) {
    add_preference(act, l, r);
  } else if (p.label == PrefLabel::Equiv) {
    add_preference(act, l, r);
    add_preference(act, r, l);
  }
}

void SatEncoding::add_symmetry_breaking() {
  // Breadth-first numbering of states (Ulyantsev, Zakirzyanov, Shalyto).
  const std::size_t m = alphabet_.size();
  const std::size_t k = k_;
  if (k < 2) return;
  auto idx = [k](std::size_t i, std::size_t j) { return i * k + j; };
  std::vector<sat::Var> t(k * k, -1);
  std::vector<sat::Var> p(k * k, -1);  // p[idx(j, i)]: parent of j is i
  std::vector<sat::Var> mv(k * m * k, -1);
  auto M = [&](std::size_t i, Symbol a, std::size_t j) { return Lit::pos(mv[(i * m + a) * k + j]); };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      t[idx(i, j)] = solver_.new_var();
      p[idx(j, i)] = solver_.new_var();
      for (Symbol a = 0; a < m; ++a) mv[(i * m + a) * k + j] = solver_.new_var();
    }
  }
  auto T = [&](std::size_t i, std::size_t j) { return Lit::pos(t[idx(i, j)]); };
  auto P = [&](std::size_t j, std::size_t i) { return Lit::pos(p[idx(j, i)]); };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<Lit> any{~T(i, j)};
      for (Symbol a = 0; a < m; ++a) {
        any.push_back(y(i, a, j));
        add({~y(i, a, j), T(i, j)});
      }
      add(any);
      std::vector<Lit> def{P(j, i), ~T(i, j)};
      add({~P(j, i), T(i, j)});
      for (std::size_t i2 = 0; i2 < i; ++i2) {
        add({~P(j, i), ~T(i2, j)});
        def.push_back(T(i2, j));
      }
      add(def);
      for (Symbol a = 0; a < m; ++a) {
        add({~M(i, a, j), y(i, a, j)});
        std::vector<Lit> mdef{M(i, a, j), ~y(i, a, j)};
        for (Symbol b = 0; b < a; ++b) {
          add({~M(i, a, j), ~y(i, b, j)});
          mdef.push_back(y(i, b, j));
        }
        add(mdef);
      }
    }
  }
  for (std::size_t j = 1; j < k; ++j) {
    std::vector<Lit> some;
    for (std::size_t i = 0; i < j; ++i) some.push_back(P(j, i));
    add(some);
  }
  for (std::size_t j = 1; j + 1 < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      for (std::size_t i2 = 0; i2 < i; ++i2) add({~P(j, i), ~P(j + 1, i2)});
      for (Symbol a = 0; a < m; ++a) {
        for (Symbol b = 0; b < a; ++b) {
          add({~P(j, i), ~P(j + 1, i), ~M(i, a, j), ~M(i, b, j + 1)});
        }
      }
    }
  }
}

void SatEncoding::sync(const KnowledgeBase& kb) {
  for (const Entry& e : kb.entries()) {
    if (e.index < activation_.size() && activation_[e.index]) continue;
    encode_entry(e);
  }
}

std::vector<Lit> SatEncoding::assumptions(const KnowledgeBase& kb) const {
  std::vector<Lit> out;
  for (const Entry& e : kb.entries()) {
    if (e.index >= activation_.size() || !activation_[e.index]) continue;
    out.push_back(e.active ? *activation_[e.index] : ~*activation_[e.index]);
  }
  return out;
}

bool SatEncoding::satisfiable(const KnowledgeBase& kb) {
  sync(kb);
  return solver_.solve(assumptions(kb)) == sat::Status::Sat;
}

Dfa SatEncoding::decode() const {
  Dfa d(alphabet_, k_);
  for (std::size_t i = 0; i < k_; ++i) {
    d.set_accepting(static_cast<State>(i), solver_.model_value(z(i)));
    for (Symbol a = 0; a < alphabet_.size(); ++a) {
      for (std::size_t j = 0; j < k_; ++j) {
        if (solver_.model_value(y(i, a, j))) d.set_transition(static_cast<State>(i), a, static_cast<State>(j));
      }
    }
  }
  return d;
}

std::vector<Dfa> SatEncoding::enumerate(const KnowledgeBase& kb, std::size_t want, std::size_t max_models,
                                        std::mt19937_64* rng) {
  sync(kb);
  std::vector<Lit> assume = assumptions(kb);
  const Lit guard = Lit::pos(solver_.new_var());
  assume.push_back(guard);
  std::set<std::string> seen;
  std::vector<Dfa> out;
  std::size_t models = 0;
  while (out.size() < want && models < max_models) {
    if (rng) solver_.randomize_phases((*rng)());
    if (solver_.solve(assume) != sat::Status::Sat) break;
    ++models;
    const Dfa d = decode();
    // Block the (z, y) assignment on the reachable states.
    std::vector<bool> reach(k_, false);
    std::vector<State> stack{0};
    reach[0] = true;
    while (!stack.empty()) {
      const State q = stack.back();
      stack.pop_back();
      for (Symbol a = 0; a < alphabet_.size(); ++a) {
        const State r = d.next(q, a);
        if (!reach[r]) {
          reach[r] = true;
          stack.push_back(r);
        }
      }
    }
    std::vector<Lit> block{~guard};
    for (std::size_t i = 0; i < k_; ++i) {
      if (!reach[i]) continue;
      block.push_back(d.accepting(static_cast<State>(i)) ? ~z(i) : z(i));
      for (Symbol a = 0; a < alphabet_.size(); ++a) block.push_back(~y(i, a, d.next(static_cast<State>(i), a)));
    }
    add(block);
    Dfa minimal = d.minimize();
    if (seen.insert(to_json(minimal).dump()).second) out.push_back(std::move(minimal));
  }
  add({~guard});
  return out;
}

std::vector<std::size_t> SatEncoding::core(const KnowledgeBase& kb, const std::vector<bool>& hard, bool minimize) {
  sync(kb);
  if (solver_.solve(assumptions(kb)) == sat::Status::Sat) {
    throw InvalidArgument("unsat_core called on a satisfiable instance");
  }
  std::unordered_map<sat::Var, std::size_t> entry_of;
  for (std::size_t i = 0; i < activation_.size(); ++i) {
    if (activation_[i]) entry_of.emplace(activation_[i]->var(), i);
  }
  auto collect = [&]() {
    std::set<std::size_t> c;
    for (Lit l : solver_.failed_assumptions()) {
      auto it = entry_of.find(l.var());
      if (it != entry_of.end() && !l.negated()) c.insert(it->second);
    }
    return c;
  };
  auto is_hard = [&](std::size_t e) { return e < hard.size() && hard[e]; };
  std::set<std::size_t> current = collect();
  const auto soft = std::count_if(current.begin(), current.end(), [&](std::size_t e) { return !is_hard(e); });
  if (minimize && soft <= 20) {
    const std::vector<std::size_t> candidates(current.begin(), current.end());
    for (std::size_t e : candidates) {
      if (is_hard(e) || current.count(e) == 0) continue;
      std::vector<Lit> assume;
      for (const Entry& f : kb.entries()) {
        if (f.index >= activation_.size() || !activation_[f.index]) continue;
        const bool on = f.active && f.index != e && (is_hard(f.index) || current.count(f.index) != 0);
        assume.push_back(on ? *activation_[f.index] : ~*activation_[f.index]);
      }
      if (solver_.solve(assume) == sat::Status::Unsat) current = collect();
    }
  }
  return {current.begin(), current.end()};
}

std::string SatEncoding::dimacs() const {
  std::ostringstream out;
  out << "c k=" << k_ << " nodes=" << tree_.nodes.size() << "\n";
  out << "p cnf " << solver_.num_vars() << " " << clauses_.size() << "\n";
  for (const auto& c : clauses_) {
    for (Lit l : c) out << l.to_dimacs() << " ";
    out << "0\n";
  }
  return out.str();
}

SatEncoding encode(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, EncodingOptions options) {
  SatEncoding enc(alphabet, k, 0, options);
  enc.sync(kb);
  return enc;
}

std::vector<Dfa> synthesize(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, std::size_t want,
                            std::uint64_t seed) {
  SatEncoding enc(alphabet, k, seed);
  return enc.enumerate(kb, want);
}

SizedDfa min_size_synthesize(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k_max) {
  for (std::size_t k = 1; k <= k_max; ++k) {
    auto found = synthesize(kb, alphabet, k, 1);
    if (!found.empty()) return {k, std::move(found.front())};
  }
  throw NoConsistentConcept(k_max);
}

std::vector<std::size_t> unsat_core(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k) {
  SatEncoding enc(alphabet, k);
  return enc.core(kb, {}, true);
}

std::size_t count_consistent(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, std::size_t cap) {
  SatEncoding enc(alphabet, k);
  return enc.enumerate(kb, cap).size();
}

}  // namespace memrep::dfa
