#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "memrep/core/consistency.hpp"
#include "memrep/core/error.hpp"
#include "memrep/core/hasse.hpp"

using namespace memrep;

namespace {

const Alphabet kLetters({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});

Atom at(const char* name) { return parse_word(name, kLetters); }

Atom letter(std::size_t i) { return Word{{static_cast<Symbol>(i)}}; }

// Fig. 1 order, written as x ≺ y.
KnowledgeBase six_atom_kb() {
  KnowledgeBase kb;
  const std::pair<const char*, const char*> less[] = {{"b", "a"}, {"c", "b"}, {"f", "c"},
                                                      {"d", "a"}, {"e", "d"}, {"f", "e"}};
  for (auto [x, y] : less) kb.add_preference(at(x), at(y), PrefLabel::Less);
  return kb;
}

ExplicitConcept set_of(std::initializer_list<const char*> names) {
  std::set<Atom> s;
  for (const char* n : names) s.insert(at(n));
  return ExplicitConcept(s);
}

struct RandomKb {
  KnowledgeBase kb;
  std::size_t atoms;
};

RandomKb random_kb(std::mt19937_64& rng, std::size_t atoms, int prefs, int mems, bool incomparable) {
  RandomKb r{{}, atoms};
  std::uniform_int_distribution<std::size_t> pick(0, atoms - 1);
  for (int i = 0; i < prefs; ++i) {
    const std::size_t x = pick(rng);
    std::size_t y = pick(rng);
    if (x == y) y = (y + 1) % atoms;
    const int kind = static_cast<int>(rng() % (incomparable ? 5 : 4));
    const PrefLabel l = kind < 2 ? PrefLabel::Less : kind == 2 ? PrefLabel::Greater
                        : kind == 3 ? PrefLabel::Equiv : PrefLabel::Incomparable;
    r.kb.add_preference(letter(x), letter(y), l);
  }
  for (int i = 0; i < mems; ++i) {
    r.kb.add_membership(letter(pick(rng)), rng() % 2 ? MemLabel::Member : MemLabel::NonMember);
  }
  return r;
}

// Brute-force preorder: geq[x][y] means x ⪰ y, strict_edge marks pairs joined
// by a Less entry.
struct Closure {
  std::vector<std::vector<bool>> geq;
};

Closure closure(const KnowledgeBase& kb, std::size_t n) {
  Closure c{std::vector<std::vector<bool>>(n, std::vector<bool>(n, false))};
  for (std::size_t i = 0; i < n; ++i) c.geq[i][i] = true;
  for (const PrefFact& p : kb.active_pref()) {
    const std::size_t x = std::get<Word>(p.lhs).symbols[0];
    const std::size_t y = std::get<Word>(p.rhs).symbols[0];
    if (p.label == PrefLabel::Less) c.geq[y][x] = true;
    if (p.label == PrefLabel::Equiv) c.geq[x][y] = c.geq[y][x] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (c.geq[i][k] && c.geq[k][j]) c.geq[i][j] = true;
      }
    }
  }
  return c;
}

bool mentioned(const KnowledgeBase& kb, std::size_t i) {
  for (const Entry& e : kb.entries()) {
    if (!e.active) continue;
    if (e.is_mem() ? e.mem().atom == letter(i) : (e.pref().lhs == letter(i) || e.pref().rhs == letter(i))) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("memrep on the six-atom example order") {
  const auto order = six_atom_kb().active_pref();
  CHECK(memrep_holds(std::span<const PrefFact>(order), set_of({"a", "b"})));
  CHECK_FALSE(memrep_holds(std::span<const PrefFact>(order), set_of({"d", "e"})));
  CHECK(memrep_holds(std::span<const PrefFact>{}, set_of({"f"})));
}

TEST_CASE("is_consistent checks labels and preferences") {
  KnowledgeBase kb;
  CHECK(is_consistent(ExplicitConcept::bottom(), kb));
  kb.add_membership(at("a"), MemLabel::Member);
  kb.add_preference(at("a"), at("b"), PrefLabel::Less);
  CHECK_FALSE(is_consistent(set_of({"a"}), kb));
  CHECK(is_consistent(set_of({"a", "b"}), kb));
  kb.set_active(1, false);
  CHECK(is_consistent(set_of({"a"}), kb));
}

TEST_CASE("greater is normalized and duplicates are no-ops") {
  KnowledgeBase kb;
  const auto i = kb.add_preference(at("a"), at("b"), PrefLabel::Greater);
  const auto& p = kb.entry(i).pref();
  CHECK(p.lhs == at("b"));
  CHECK(p.rhs == at("a"));
  CHECK(p.label == PrefLabel::Less);
  CHECK(kb.add_preference(at("b"), at("a"), PrefLabel::Less) == i);
  const auto e = kb.add_preference(at("c"), at("a"), PrefLabel::Equiv);
  CHECK(kb.add_preference(at("a"), at("c"), PrefLabel::Equiv) == e);
  kb.add_membership(at("a"), MemLabel::Member);
  kb.add_membership(at("a"), MemLabel::NonMember);
  CHECK(kb.size() == 4);
  const auto report = detect_violations(kb);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::ConflictingLabels);
}

TEST_CASE("knowledge base json round trip") {
  KnowledgeBase kb = six_atom_kb();
  kb.add_membership(at("a"), MemLabel::Member);
  kb.add_preference(at("a"), at("g"), PrefLabel::Incomparable);
  const auto j = to_json(kb, kLetters);
  CHECK(j["mem"][0] == nlohmann::json::array({"a", "in"}));
  CHECK(j["pref"][0] == nlohmann::json::array({"b", "a", "<"}));
  const KnowledgeBase back = kb_from_json(j, kLetters);
  CHECK(to_json(back, kLetters) == j);

  const auto points = nlohmann::json::parse(R"({"mem": [[["0.25", "1/3"], "out"]],
                                                "pref": [[["0.5", 1], ["0", "0.75"], ">"]]})");
  const KnowledgeBase pk = kb_from_json(points, kLetters);
  CHECK(pk.entry(0).mem().atom == Atom(Point{{Rational(1, 4), Rational(1, 3)}}));
  CHECK(pk.entry(1).pref().lhs == Atom(Point{{Rational(0), Rational(3, 4)}}));
  CHECK(to_json(pk, kLetters)["pref"][0][1] == nlohmann::json::array({"0.5", "1"}));
  CHECK_THROWS_AS(kb_from_json(nlohmann::json::parse(R"({"mem": [["z", "in"]]})"), kLetters), UnknownSymbol);
  CHECK_THROWS_AS(kb_from_json(nlohmann::json::parse(R"({"mem": [["a", "maybe"]]})"), kLetters), ParseError);
}

TEST_CASE("rational formatting") {
  CHECK(format_rational(Rational(1, 4)) == "0.25");
  CHECK(format_rational(Rational(1, 3)) == "1/3");
  CHECK(format_rational(Rational(1)) == "1");
  CHECK(format_rational(Rational(7, 20)) == "0.35");
  CHECK(parse_rational("0.350") == Rational(7, 20));
  CHECK(parse_rational("2/6") == Rational(1, 3));
  CHECK(parse_word("", kLetters).symbols.empty());
  CHECK(format_word(parse_word("a.b.a", kLetters), kLetters) == "a.b.a");
}

TEST_CASE("hasse diagram of a chain and of the example order") {
  KnowledgeBase chain;
  chain.add_preference(at("b"), at("a"), PrefLabel::Less);
  chain.add_preference(at("c"), at("b"), PrefLabel::Less);
  auto h = std::get<HasseDiagram>(build_hasse(chain));
  CHECK(h.nodes.size() == 3);
  CHECK(h.edges.size() == 2);
  CHECK(h.prefers(at("a"), at("c")));
  CHECK_FALSE(h.prefers(at("c"), at("a")));

  KnowledgeBase cycle;
  cycle.add_preference(at("a"), at("b"), PrefLabel::Less);
  cycle.add_preference(at("b"), at("a"), PrefLabel::Less);
  const auto r = std::get<ViolationReport>(build_hasse(cycle));
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::StrictCycle);
  CHECK(r.violations[0].entries == std::vector<std::size_t>{0, 1});

  auto hasse = std::get<HasseDiagram>(build_hasse(six_atom_kb()));
  CHECK(hasse.nodes.size() == 6);
  std::set<std::pair<Atom, Atom>> edges;
  for (auto [u, v] : hasse.edges) edges.emplace(hasse.nodes[u][0], hasse.nodes[v][0]);
  const std::set<std::pair<Atom, Atom>> expected{{at("a"), at("b")}, {at("b"), at("c")}, {at("c"), at("f")},
                                                 {at("a"), at("d")}, {at("d"), at("e")}, {at("e"), at("f")}};
  CHECK(edges == expected);

  // A redundant shortcut disappears from the reduction.
  KnowledgeBase shortcut = chain;
  shortcut.add_preference(at("c"), at("a"), PrefLabel::Less);
  CHECK(std::get<HasseDiagram>(build_hasse(shortcut)).edges.size() == 2);
}

TEST_CASE("violation examples") {
  KnowledgeBase kb;
  kb.add_membership(at("b"), MemLabel::Member);     // y := b
  kb.add_membership(at("a"), MemLabel::NonMember);                     // x := a
  kb.add_preference(at("b"), at("a"), PrefLabel::Less);
  auto r = detect_violations(kb);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::MemRep);
  CHECK(r.violations[0].entries == std::vector<std::size_t>{0, 1, 2});

  KnowledgeBase tri;
  tri.add_preference(at("a"), at("b"), PrefLabel::Less);
  tri.add_preference(at("b"), at("c"), PrefLabel::Less);
  tri.add_preference(at("c"), at("a"), PrefLabel::Less);
  r = detect_violations(tri);
  REQUIRE_FALSE(r.empty());
  CHECK(r.has_preorder_violation());
  CHECK(r.violations[0].entries == std::vector<std::size_t>{0, 1, 2});

  KnowledgeBase equiv_less;
  equiv_less.add_preference(at("a"), at("b"), PrefLabel::Less);
  equiv_less.add_preference(at("a"), at("b"), PrefLabel::Equiv);
  CHECK(detect_violations(equiv_less).has_preorder_violation());

  KnowledgeBase inc;
  inc.add_preference(at("a"), at("b"), PrefLabel::Less);
  inc.add_preference(at("b"), at("c"), PrefLabel::Less);
  inc.add_preference(at("c"), at("a"), PrefLabel::Incomparable);
  r = detect_violations(inc);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::IncomparableEntailed);

  KnowledgeBase clean = six_atom_kb();
  clean.add_membership(at("a"), MemLabel::Member);
  clean.add_membership(at("b"), MemLabel::Member);
  for (const char* n : {"c", "d", "e", "f"}) clean.add_membership(at(n), MemLabel::NonMember);
  CHECK(detect_violations(clean).empty());
}

TEST_CASE("consistent_filter on explicit classes") {
  const std::vector<ExplicitConcept> cls{set_of({"a", "b"}), set_of({"d", "e"})};
  const auto kept = consistent_filter(std::span<const ExplicitConcept>(cls), six_atom_kb());
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == cls[0]);
  CHECK(consistent_filter(std::span<const ExplicitConcept>(cls), KnowledgeBase{}).size() == 2);

  std::mt19937_64 rng(3);
  const std::vector<ExplicitConcept> extremes{ExplicitConcept::top(), ExplicitConcept::bottom()};
  for (int t = 0; t < 50; ++t) {
    const auto r = random_kb(rng, 6, 8, 0, true);
    CHECK(consistent_filter(std::span<const ExplicitConcept>(extremes), r.kb).size() == 2);
  }
}

TEST_CASE("reduced diagram re-expands to the brute-force strict closure") {
  std::mt19937_64 rng(17);
  int diagrams = 0;
  for (int t = 0; t < 600; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 6);
    const auto r = random_kb(rng, n, static_cast<int>(1 + t % 9), 0, true);
    const Closure c = closure(r.kb, n);
    bool oracle_violation = false;
    for (const PrefFact& p : r.kb.active_pref()) {
      const std::size_t x = std::get<Word>(p.lhs).symbols[0];
      const std::size_t y = std::get<Word>(p.rhs).symbols[0];
      if (p.label == PrefLabel::Less && c.geq[x][y]) oracle_violation = true;
      if (p.label == PrefLabel::Incomparable && (c.geq[x][y] || c.geq[y][x])) oracle_violation = true;
    }
    const auto result = build_hasse(r.kb);
    REQUIRE(std::holds_alternative<ViolationReport>(result) == oracle_violation);
    if (oracle_violation) continue;
    ++diagrams;
    const auto& h = std::get<HasseDiagram>(result);
    std::set<std::pair<Atom, Atom>> got;
    for (auto& pr : h.strict_pairs()) got.insert(pr);
    std::set<std::pair<Atom, Atom>> expected;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (mentioned(r.kb, i) && mentioned(r.kb, j) && c.geq[i][j] && !c.geq[j][i]) {
          expected.emplace(letter(i), letter(j));
        }
      }
    }
    CHECK(got == expected);
    for (const auto& node : h.nodes) {
      for (const Atom& a : node) {
        for (const Atom& b : node) {
          CHECK(c.geq[std::get<Word>(a).symbols[0]][std::get<Word>(b).symbols[0]]);
        }
      }
    }
  }
  CHECK(diagrams > 200);
}

TEST_CASE("label violations are empty iff some subset of atoms is consistent") {
  // Preorder violations are excluded: a strict cycle still admits concepts
  // constant on the cycle.
  std::mt19937_64 rng(23);
  int consistent_seen = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 9);
    const auto r = random_kb(rng, n, static_cast<int>(t % 8), static_cast<int>(1 + t % 5), t % 2 == 0);
    const auto report = detect_violations(r.kb);
    const bool label_clean = std::none_of(report.violations.begin(), report.violations.end(), [](const Violation& v) {
      return v.kind == ViolationKind::MemRep || v.kind == ViolationKind::ConflictingLabels;
    });
    bool exists = false;
    for (std::uint32_t mask = 0; mask < (1u << n) && !exists; ++mask) {
      std::set<Atom> s;
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) s.insert(letter(i));
      }
      exists = is_consistent(ExplicitConcept(s), r.kb);
    }
    consistent_seen += exists ? 1 : 0;
    CHECK(label_clean == exists);
  }
  CHECK(consistent_seen > 100);
  CHECK(consistent_seen < 450);
}

TEST_CASE("more entries never enlarge the consistent set") {
  std::mt19937_64 rng(29);
  std::vector<ExplicitConcept> powerset;
  for (std::uint32_t mask = 0; mask < 64; ++mask) {
    std::set<Atom> s;
    for (std::size_t i = 0; i < 6; ++i) {
      if ((mask >> i) & 1u) s.insert(letter(i));
    }
    powerset.emplace_back(s);
  }
  for (int t = 0; t < 100; ++t) {
    const auto big = random_kb(rng, 6, 6, 3, true);
    KnowledgeBase prefix;
    std::size_t last = powerset.size() + 1;
    for (const Entry& e : big.kb.entries()) {
      prefix.add(e.fact);
      const auto kept = consistent_filter(std::span<const ExplicitConcept>(powerset), prefix);
      CHECK(kept.size() <= last);
      last = kept.size();
      for (const auto& c : kept) {
        for (const PrefFact& p : prefix.active_pref()) {
          if (p.label == PrefLabel::Equiv) CHECK(c.contains(p.lhs) == c.contains(p.rhs));
        }
      }
    }
  }
}
