#include "doctest.h"

#include <random>
#include <set>

#include "memrep/core/consistency.hpp"
#include "memrep/dfa/encoding.hpp"
#include "memrep/dfa/targets.hpp"
#include "support/brute_force.hpp"

using namespace memrep;
using namespace memrep::dfa;

namespace {

const Alphabet kBin = Alphabet::binary();

Word w(const char* text, const Alphabet& a = kBin) { return parse_word(text, a); }

int count(const Word& word, Symbol s) {
  return static_cast<int>(std::count(word.symbols.begin(), word.symbols.end(), s));
}

// Tomita predicates written directly over the symbol sequence.
bool tomita_predicate(int n, const Word& x) {
  const auto& s = x.symbols;
  switch (n) {
    case 1:
      return count(x, 0) == 0;
    case 2: {
      if (s.size() % 2 != 0) return false;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != (i % 2 == 0 ? 1 : 0)) return false;
      }
      return true;
    }
    case 3: {
      // Maximal runs; an odd 1-run immediately followed by an odd 0-run rejects.
      std::vector<std::pair<Symbol, std::size_t>> runs;
      for (Symbol c : s) {
        if (runs.empty() || runs.back().first != c) runs.emplace_back(c, 0);
        ++runs.back().second;
      }
      for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        if (runs[i].first == 1 && runs[i].second % 2 == 1 && runs[i + 1].second % 2 == 1) return false;
      }
      return true;
    }
    case 4:
      for (std::size_t i = 0; i + 2 < s.size(); ++i) {
        if (s[i] == 0 && s[i + 1] == 0 && s[i + 2] == 0) return false;
      }
      return true;
    case 5:
      return count(x, 0) % 2 == 0 && count(x, 1) % 2 == 0;
    case 6:
      return (count(x, 0) - count(x, 1)) % 3 == 0;
    case 7: {
      int changes = 0;
      for (std::size_t i = 1; i < s.size(); ++i) changes += s[i] != s[i - 1] ? 1 : 0;
      return changes + (s.empty() || s[0] == 0 ? 0 : 1) <= 3;
    }
  }
  return false;
}

KnowledgeBase label_all(const Dfa& target, std::size_t max_len) {
  KnowledgeBase kb;
  for (const Word& x : all_words(target.alphabet(), max_len)) {
    kb.add_membership(x, target.accepts(x) ? MemLabel::Member : MemLabel::NonMember);
  }
  return kb;
}

}  // namespace

TEST_CASE("grid-world task acceptance") {
  const Alphabet t = tile_alphabet();
  const Dfa d = grid_world_task();
  CHECK(d.accepts(w("Y", t)));
  CHECK_FALSE(d.accepts(w("Bl.Y", t)));
  CHECK_FALSE(d.accepts(w("Br.Bl.Y", t)));
  CHECK(d.accepts(w("Bl.Br.Y", t)));
  CHECK(d.accepts(w("Br.Y", t)));
  CHECK_FALSE(d.accepts(w("", t)));
  CHECK_FALSE(d.accepts(w("R.Y", t)));
  CHECK(d.minimize().num_states() == 4);
  CHECK(Dfa::universal(t).accepts(Word{}));
  CHECK_THROWS_AS(d.accepts(Word{{9}}), UnknownSymbol);
}

TEST_CASE("conjunction identities and the prior decomposition") {
  const Alphabet t = tile_alphabet();
  const Dfa d = grid_world_task();
  CHECK(equivalent(conjunction(d, Dfa::universal(t)), d));
  CHECK(is_empty(conjunction(d, Dfa::empty(t))));
  const Dfa both = conjunction(ry_prior(), bby_task());
  for (const Word& x : all_words(t, 4)) {
    CHECK(both.accepts(x) == (ry_prior().accepts(x) && bby_task().accepts(x)));
    CHECK(both.accepts(x) == d.accepts(x));
  }
  CHECK(equivalent(both, d));
  CHECK_THROWS_AS(conjunction(d, tomita(1)), InvalidArgument);
}

TEST_CASE("conjunction matches word-by-word evaluation on random operands") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Dfa a(kBin, 3);
    Dfa b(kBin, 3);
    for (Dfa* d : {&a, &b}) {
      for (State q = 0; q < 3; ++q) {
        d->set_accepting(q, rng() % 2 == 0);
        for (Symbol s = 0; s < 2; ++s) d->set_transition(q, s, static_cast<State>(rng() % 3));
      }
    }
    const Dfa c = conjunction(a, b);
    const Dfa x = symmetric_difference(a, b);
    for (const Word& word : all_words(kBin, 6)) {
      CHECK(c.accepts(word) == (a.accepts(word) && b.accepts(word)));
      CHECK(x.accepts(word) == (a.accepts(word) != b.accepts(word)));
    }
    const Dfa m = a.minimize();
    for (const Word& word : all_words(kBin, 6)) CHECK(m.accepts(word) == a.accepts(word));
    CHECK(m.num_states() <= a.canonical().num_states());
  }
}

TEST_CASE("benchmark targets match their defining predicates") {
  const std::size_t sizes[] = {2, 3, 5, 4, 4, 3, 5};
  for (int n = 1; n <= 7; ++n) {
    const Dfa d = tomita(n);
    CHECK(d.minimize().num_states() == sizes[n - 1]);
    for (const Word& x : all_words(kBin, 8)) CHECK_MESSAGE(d.accepts(x) == tomita_predicate(n, x), "tomita " << n);
  }
  const Dfa m5 = modulo_k(5);
  CHECK(m5.minimize().num_states() == 5);
  for (const Word& x : all_words(m5.alphabet(), 12)) CHECK(m5.accepts(x) == (x.size() % 5 == 0));
  for (std::size_t n = 1; n <= 4; ++n) {
    const Dfa s = scaled_tomita4(n);
    CHECK(s.minimize().num_states() == n + 2);
    for (const Word& x : all_words(kBin, 8)) {
      std::size_t run = 0;
      std::size_t longest = 0;
      for (Symbol c : x.symbols) {
        run = c == 0 ? run + 1 : 0;
        longest = std::max(longest, run);
      }
      CHECK(s.accepts(x) == (longest <= n));
    }
  }
  CHECK(equivalent(scaled_tomita4(2), tomita(4)));
}

TEST_CASE("difference words and band sampling") {
  const Alphabet t = tile_alphabet();
  Dfa only_y(t, 3);
  for (Symbol s = 0; s < 4; ++s) {
    only_y.set_transition(0, s, s == 3 ? 1 : 2);
    only_y.set_transition(1, s, 2);
    only_y.set_transition(2, s, 2);
  }
  only_y.set_accepting(1, true);
  CHECK(shortest_difference(only_y, Dfa::empty(t)) == w("Y", t));
  CHECK_FALSE(shortest_difference(only_y, only_y).has_value());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto x = sample_accepted(symmetric_difference(tomita(5), tomita(1)), 4, rng);
    REQUIRE(x.has_value());
    CHECK(tomita(5).accepts(*x) != tomita(1).accepts(*x));
    CHECK(x->size() <= 5);  // shortest difference "1" plus slack 4
  }
  // Universal DFA, band [0, 2]: 1, 2 and 4 words per length, so 1/7 and 4/7 of draws.
  std::map<std::size_t, int> by_len;
  for (int i = 0; i < 6000; ++i) ++by_len[sample_accepted(Dfa::universal(kBin), 2, rng)->size()];
  CHECK(by_len[0] > 700);
  CHECK(by_len[0] < 1300);
  CHECK(by_len[2] > 3200);
  CHECK(by_len[2] < 3650);
}

TEST_CASE("dfa json and dot") {
  const Dfa d = grid_world_task();
  const auto j = to_json(d);
  CHECK(j["states"] == 4);
  CHECK(j["transitions"].size() == 16);
  CHECK(dfa_from_json(j) == d);
  CHECK(to_dot(d).find("doublecircle") != std::string::npos);
  auto broken = j;
  broken["transitions"].erase(0);
  CHECK_THROWS_AS(dfa_from_json(broken), ParseError);
}

TEST_CASE("prefix tree construction") {
  const Alphabet t = tile_alphabet();
  KnowledgeBase kb;
  kb.add_membership(w("", t), MemLabel::NonMember);
  kb.add_membership(w("Y", t), MemLabel::Member);
  auto tree = build_prefix_tree(kb, t.size());
  REQUIRE(tree.nodes.size() == 2);
  CHECK(tree.nodes[0].label == MemLabel::NonMember);
  CHECK(tree.nodes[1].label == MemLabel::Member);

  KnowledgeBase pref;
  pref.add_preference(w("R", t), w("Y", t), PrefLabel::Less);
  tree = build_prefix_tree(pref, t.size());
  CHECK(tree.nodes.size() == 3);
  for (const auto& n : tree.nodes) CHECK_FALSE(n.label.has_value());

  KnowledgeBase shared;
  shared.add_membership(w("Br", t), MemLabel::Member);
  shared.add_membership(w("Br.Y", t), MemLabel::Member);
  CHECK(build_prefix_tree(shared, t.size()).nodes.size() == 3);
}

TEST_CASE("preference clauses force acceptance") {
  KnowledgeBase kb;
  kb.add_membership(w("0"), MemLabel::Member);
  kb.add_preference(w("0"), w("1"), PrefLabel::Less);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto models = synthesize(kb, kBin, k, 1000);
    CHECK_FALSE(models.empty());
    for (const Dfa& d : models) CHECK(d.accepts(w("1")));
  }
  // Brute force: no DFA with at most two states accepts 0, rejects 1 and respects 0 ⪯ 1.
  testing::for_each_dfa(kBin, 2, [&](const Dfa& d) {
    if (d.accepts(w("0")) && !d.accepts(w("1"))) CHECK_FALSE(is_consistent(d, kb));
  });

  KnowledgeBase clash;
  clash.add_membership(w(""), MemLabel::Member);
  clash.add_membership(w("0"), MemLabel::NonMember);
  CHECK_FALSE(encode(clash, kBin, 1).satisfiable(clash));
}

TEST_CASE("preference entries add exactly their clauses") {
  KnowledgeBase mem;
  mem.add_membership(w("0.1"), MemLabel::Member);
  mem.add_membership(w("1"), MemLabel::NonMember);
  const std::size_t k = 3;
  const auto base = encode(mem, kBin, k).num_clauses();
  KnowledgeBase both = mem;
  both.add_preference(w("0.1"), w("1"), PrefLabel::Incomparable);
  CHECK(encode(both, kBin, k).num_clauses() == base);
  both.add_preference(w("0.1"), w("1"), PrefLabel::Greater);
  CHECK(encode(both, kBin, k).num_clauses() == base + k * k);
  both.add_preference(w("0"), w("0.1"), PrefLabel::Equiv);
  CHECK(encode(both, kBin, k).num_clauses() == base + 3 * k * k);
  const std::string cnf = encode(both, kBin, k).dimacs();
  CHECK(cnf.find("p cnf") != std::string::npos);
}

TEST_CASE("synthesize examples") {
  const auto both = synthesize(KnowledgeBase{}, kBin, 1, 2);
  REQUIRE(both.size() == 2);
  CHECK(both[0].accepts(Word{}) != both[1].accepts(Word{}));

  // Words up to length 3 leave many 4-state languages open; length 4 pins
  // the task down.
  const Dfa target = grid_world_task();
  CHECK(synthesize(label_all(target, 3), target.alphabet(), 4, 10).size() == 10);
  const auto models = synthesize(label_all(target, 4), target.alphabet(), 4, 10);
  REQUIRE(models.size() == 1);
  for (const Dfa& d : models) {
    for (const Word& x : all_words(target.alphabet(), 6)) CHECK(d.accepts(x) == target.accepts(x));
  }

  KnowledgeBase contradictory;
  contradictory.add_membership(w("1"), MemLabel::Member);
  contradictory.add_membership(w("1"), MemLabel::NonMember);
  CHECK(synthesize(contradictory, kBin, 3, 5).empty());
}

TEST_CASE("minimum size synthesis") {
  const Dfa target = grid_world_task();
  const auto found = min_size_synthesize(label_all(target, 4), target.alphabet(), 6);
  CHECK(found.k == 4);
  CHECK(equivalent(found.dfa, target));
  CHECK(min_size_synthesize(KnowledgeBase{}, kBin, 3).k == 1);
  CHECK(min_size_synthesize(label_all(tomita(1), 5), kBin, 4).k == 2);
  CHECK_THROWS_AS(min_size_synthesize(label_all(tomita(3), 5), kBin, 2), NoConsistentConcept);
}

TEST_CASE("unsat cores name the contradiction") {
  KnowledgeBase kb;
  kb.add_membership(w("0"), MemLabel::Member);
  kb.add_membership(w("1"), MemLabel::NonMember);
  kb.add_preference(w("0"), w("1"), PrefLabel::Less);
  kb.add_membership(w("1.1"), MemLabel::Member);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto core = unsat_core(kb, kBin, k);
    KnowledgeBase only;
    for (std::size_t e : core) {
      CHECK(e <= 2);
      only.add(kb.entry(e).fact);
    }
    CHECK(synthesize(only, kBin, k, 1).empty());
  }
  // At k = 1 the two labels already clash; from k = 2 the preference is needed.
  CHECK(unsat_core(kb, kBin, 1) == std::vector<std::size_t>{0, 1});
  CHECK(unsat_core(kb, kBin, 2) == std::vector<std::size_t>{0, 1, 2});
  KnowledgeBase fine;
  fine.add_membership(w("0"), MemLabel::Member);
  CHECK_THROWS_AS(unsat_core(fine, kBin, 1), InvalidArgument);

  std::mt19937_64 rng(41);
  int hits = 0;
  for (int trial = 0; trial < 20; ++trial) {
    KnowledgeBase noisy = label_all(tomita(6), 4);
    const std::size_t flip = rng() % noisy.size();
    KnowledgeBase relabeled;
    for (const Entry& e : noisy.entries()) {
      MemLabel l = e.mem().label;
      if (e.index == flip) l = opposite(l);
      relabeled.add_membership(e.mem().atom, l);
    }
    const auto core = unsat_core(relabeled, kBin, 3);
    hits += std::find(core.begin(), core.end(), flip) != core.end() ? 1 : 0;
  }
  CHECK(hits >= 18);
}

TEST_CASE("count_consistent examples") {
  CHECK(count_consistent(KnowledgeBase{}, kBin, 1, 10) == 2);
  KnowledgeBase contradictory;
  contradictory.add_membership(w("1"), MemLabel::Member);
  contradictory.add_membership(w("1"), MemLabel::NonMember);
  CHECK(count_consistent(contradictory, kBin, 2, 10) == 0);
  KnowledgeBase one;
  one.add_membership(w("0"), MemLabel::Member);
  CHECK(count_consistent(one, kBin, 1, 10) == 1);
  CHECK(count_consistent(KnowledgeBase{}, kBin, 2, 3) == 3);
}

TEST_CASE("synthesis equals brute-force enumeration at small sizes") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const KnowledgeBase kb = testing::random_word_kb(rng, 2, 4, 6);
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
    std::set<std::string> got;
    for (const Dfa& d : synthesize(kb, kBin, k, SIZE_MAX, static_cast<std::uint64_t>(trial))) {
      CHECK(is_consistent(d, kb));
      got.insert(d.serialize());
    }
    CHECK(got == testing::brute_force_languages(kb, kBin, k));
    SatEncoding plain(kBin, k, 0, EncodingOptions{false});
    std::set<std::string> unbroken;
    for (const Dfa& d : plain.enumerate(kb, SIZE_MAX)) unbroken.insert(d.serialize());
    CHECK(unbroken == got);
  }
}

TEST_CASE("incremental encoding follows activation flags") {
  KnowledgeBase kb;
  SatEncoding enc(kBin, 1);
  kb.add_membership(w(""), MemLabel::Member);
  CHECK(enc.satisfiable(kb));
  kb.add_membership(w("0"), MemLabel::NonMember);
  CHECK_FALSE(enc.satisfiable(kb));
  kb.set_active(1, false);
  CHECK(enc.satisfiable(kb));
  CHECK(enc.enumerate(kb, 5).size() == 1);
  CHECK(enc.enumerate(kb, 5).size() == 1);
  kb.set_active(1, true);
  std::vector<bool> hard(kb.size(), false);
  hard[1] = true;
  CHECK(enc.core(kb, hard, true) == std::vector<std::size_t>{0, 1});
}
