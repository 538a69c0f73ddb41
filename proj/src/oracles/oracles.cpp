#include "memrep/oracles/oracles.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include "memrep/core/error.hpp"

namespace memrep::oracles {

namespace {

double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

PrefLabel swapped(PrefLabel l) {
  switch (l) {
    case PrefLabel::Less: return PrefLabel::Greater;
    case PrefLabel::Greater: return PrefLabel::Less;
    default: return l;
  }
}

// Memo keyed by an ordered pair; answers are stored for (min, max).
class PairMemo {
 public:
  std::optional<PrefLabel> get(const Atom& x, const Atom& y) const {
    const bool flip = y < x;
    auto it = memo_.find(flip ? std::pair(y, x) : std::pair(x, y));
    if (it == memo_.end()) return std::nullopt;
    return flip ? swapped(it->second) : it->second;
  }
  void put(const Atom& x, const Atom& y, PrefLabel l) {
    if (y < x)
      memo_[{y, x}] = swapped(l);
    else
      memo_[{x, y}] = l;
  }

 private:
  std::map<std::pair<Atom, Atom>, PrefLabel> memo_;
};

class RandomMemrepOrder final : public Teacher {
 public:
  RandomMemrepOrder(Membership target, RandomOrderParams p) : target_(std::move(target)), p_(p) {
    if (p.frac_incomparable < 0 || p.frac_incomparable > 1 || p.frac_strict_unforced < 0 || p.frac_strict_unforced > 1)
      throw InvalidArgument("order fractions must lie in [0,1]");
    // Buckets: one of mass q, the rest equal, with sum of squares 1 - f so a
    // random same-label pair shares a bucket with probability 1 - f.
    const double s = 1.0 - p.frac_strict_unforced;
    if (s < 1e-12) {
      continuous_ = true;
      return;
    }
    const auto n = static_cast<std::size_t>(std::ceil(1.0 / s - 1e-12));
    if (n <= 1) {
      cuts_ = {1.0};
      return;
    }
    const double m = static_cast<double>(n - 1);
    const double q = (1.0 + std::sqrt(std::max(0.0, 1.0 - (m + 1) * (1.0 - s * m)))) / (m + 1);
    double acc = q;
    cuts_.push_back(acc);
    for (std::size_t b = 1; b < n; ++b) {
      acc += (1.0 - q) / m;
      cuts_.push_back(b + 1 == n ? 1.0 : acc);
    }
  }

  MemLabel membership(const Atom& x) override { return target_(x) ? MemLabel::Member : MemLabel::NonMember; }

  PrefLabel compare(const Atom& x, const Atom& y) override {
    if (x == y) return PrefLabel::Equiv;
    if (auto m = memo_.get(x, y)) return *m;
    PrefLabel answer = base(x, y);
    if (!reaches(x, y) && !reaches(y, x)) {
      const Atom& lo = x < y ? x : y;
      const Atom& hi = x < y ? y : x;
      const double coin = unit(mix64(p_.seed ^ 0x5bd1e995u ^ hash_value(lo) ^ mix64(hash_value(hi) + 1)));
      if (coin < p_.frac_incomparable || breaks_incomparable(x, y, answer)) answer = PrefLabel::Incomparable;
    }
    record(x, y, answer);
    memo_.put(x, y, answer);
    return answer;
  }

 private:
  std::pair<int, double> key(const Atom& a) const {
    const int block = target_(a) ? 1 : 0;
    const double u = unit(mix64(p_.seed ^ hash_value(a)));
    if (continuous_) return {block, u};
    std::size_t b = 0;
    while (b + 1 < cuts_.size() && u >= cuts_[b]) ++b;
    return {block, static_cast<double>(b)};
  }

  PrefLabel base(const Atom& x, const Atom& y) const {
    auto kx = key(x), ky = key(y);
    if (kx < ky) return PrefLabel::Less;
    if (ky < kx) return PrefLabel::Greater;
    return PrefLabel::Equiv;
  }

  // Arcs point from the less preferred atom to the more preferred one.
  std::vector<Atom> closure(const Atom& from, bool forward) const {
    const auto& adj = forward ? up_ : down_;
    std::vector<Atom> out{from};
    std::set<Atom> seen{from};
    for (std::size_t h = 0; h < out.size(); ++h) {
      auto it = adj.find(out[h]);
      if (it == adj.end()) continue;
      for (const auto& n : it->second)
        if (seen.insert(n).second) out.push_back(n);
    }
    return out;
  }

  bool reaches(const Atom& a, const Atom& b) const {
    for (const auto& n : closure(a, true))
      if (n == b) return true;
    return false;
  }

  // Would adding the comparison make some recorded incomparable pair comparable?
  bool breaks_incomparable(const Atom& x, const Atom& y, PrefLabel l) const {
    if (incomparable_.empty()) return false;
    auto check = [&](const Atom& lo, const Atom& hi) {
      auto below = closure(lo, false);
      auto above = closure(hi, true);
      std::set<Atom> bs(below.begin(), below.end()), as(above.begin(), above.end());
      for (const auto& [a, b] : incomparable_)
        if ((bs.count(a) && as.count(b)) || (bs.count(b) && as.count(a))) return true;
      return false;
    };
    if (l == PrefLabel::Less || l == PrefLabel::Equiv)
      if (check(x, y)) return true;
    if (l == PrefLabel::Greater || l == PrefLabel::Equiv)
      if (check(y, x)) return true;
    return false;
  }

  void arc(const Atom& lo, const Atom& hi) {
    up_[lo].push_back(hi);
    down_[hi].push_back(lo);
  }

  void record(const Atom& x, const Atom& y, PrefLabel l) {
    switch (l) {
      case PrefLabel::Less: arc(x, y); break;
      case PrefLabel::Greater: arc(y, x); break;
      case PrefLabel::Equiv:
        arc(x, y);
        arc(y, x);
        break;
      case PrefLabel::Incomparable: incomparable_.emplace_back(x, y); break;
    }
  }

  Membership target_;
  RandomOrderParams p_;
  bool continuous_ = false;
  std::vector<double> cuts_;
  PairMemo memo_;
  std::map<Atom, std::vector<Atom>> up_, down_;
  std::vector<std::pair<Atom, Atom>> incomparable_;
};

class TomitaSemanticOrder final : public Teacher {
 public:
  explicit TomitaSemanticOrder(dfa::Dfa target) : d_(target.minimize()) {
    for (dfa::State q = 0; q < d_.num_states(); ++q) {
      bool sink = !d_.accepting(q);
      for (Symbol a = 0; sink && a < d_.alphabet().size(); ++a) sink = d_.next(q, a) == q;
      if (sink) sink_ = q;
    }
  }

  MemLabel membership(const Atom& x) override { return d_.contains(x) ? MemLabel::Member : MemLabel::NonMember; }

  PrefLabel compare(const Atom& x, const Atom& y) override {
    const Word& wx = word(x);
    const Word& wy = word(y);
    const bool mx = d_.accepts(wx), my = d_.accepts(wy);
    if (mx != my) return mx ? PrefLabel::Greater : PrefLabel::Less;
    if (mx) return order(extensions(wx), extensions(wy));
    if (sink_) {
      auto r = order(sink_step(wx), sink_step(wy));
      if (r != PrefLabel::Equiv) return r;
    }
    return order(accepted_prefix(wx), accepted_prefix(wy));
  }

 private:
  static const Word& word(const Atom& a) {
    if (!std::holds_alternative<Word>(a)) throw InvalidArgument("word atom expected");
    return std::get<Word>(a);
  }

  static PrefLabel order(std::int64_t a, std::int64_t b) {
    if (a < b) return PrefLabel::Less;
    if (a > b) return PrefLabel::Greater;
    return PrefLabel::Equiv;
  }

  std::int64_t extensions(const Word& w) const {
    const dfa::State q = d_.run(w);
    std::int64_t n = 0;
    for (Symbol a = 0; a < d_.alphabet().size(); ++a)
      for (Symbol b = 0; b < d_.alphabet().size(); ++b) n += d_.accepting(d_.next(d_.next(q, a), b));
    return n;
  }

  std::int64_t sink_step(const Word& w) const {
    dfa::State q = 0;
    if (q == *sink_) return 0;
    for (std::size_t t = 0; t < w.symbols.size(); ++t) {
      q = d_.next(q, w.symbols[t]);
      if (q == *sink_) return static_cast<std::int64_t>(t + 1);
    }
    return std::numeric_limits<std::int64_t>::max();
  }

  std::int64_t accepted_prefix(const Word& w) const {
    dfa::State q = 0;
    std::int64_t best = d_.accepting(q) ? 0 : -1;
    for (std::size_t t = 0; t < w.symbols.size(); ++t) {
      q = d_.next(q, w.symbols[t]);
      if (d_.accepting(q)) best = static_cast<std::int64_t>(t + 1);
    }
    return best;
  }

  dfa::Dfa d_;
  std::optional<dfa::State> sink_;
};

class CostThreshold final : public Teacher {
 public:
  CostThreshold(std::function<Rational(const Atom&)> cost, Rational delta) : cost_(std::move(cost)), delta_(delta) {}

  MemLabel membership(const Atom& x) override { return cost_(x) <= delta_ ? MemLabel::Member : MemLabel::NonMember; }

  PrefLabel compare(const Atom& x, const Atom& y) override {
    const Rational cx = cost_(x), cy = cost_(y);
    if (cx < cy) return PrefLabel::Greater;
    if (cy < cx) return PrefLabel::Less;
    return PrefLabel::Equiv;
  }

 private:
  std::function<Rational(const Atom&)> cost_;
  Rational delta_;
};

class Noisy final : public Teacher {
 public:
  Noisy(std::unique_ptr<Teacher> inner, double eps, std::uint64_t seed) : inner_(std::move(inner)), eps_(eps), rng_(seed) {
    if (eps < 0 || eps > 1) throw InvalidArgument("noise rate must lie in [0,1]");
  }

  MemLabel membership(const Atom& x) override {
    if (auto it = mem_.find(x); it != mem_.end()) return it->second;
    MemLabel l = inner_->membership(x);
    if (flip()) l = opposite(l);
    mem_.emplace(x, l);
    return l;
  }

  PrefLabel compare(const Atom& x, const Atom& y) override {
    if (auto m = pref_.get(x, y)) return *m;
    PrefLabel l = inner_->compare(x, y);
    if (flip()) {
      static constexpr PrefLabel all[] = {PrefLabel::Less, PrefLabel::Greater, PrefLabel::Equiv, PrefLabel::Incomparable};
      std::vector<PrefLabel> others;
      for (auto o : all)
        if (o != l) others.push_back(o);
      l = others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng_)];
    }
    pref_.put(x, y, l);
    return l;
  }

 private:
  bool flip() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < eps_; }

  std::unique_ptr<Teacher> inner_;
  double eps_;
  std::mt19937_64 rng_;
  std::map<Atom, MemLabel> mem_;
  PairMemo pref_;
};

class DfaEquivalence final : public EquivalenceOracle {
 public:
  DfaEquivalence(dfa::Dfa target, std::size_t slack, std::uint64_t seed)
      : target_(std::move(target)), slack_(slack), rng_(seed) {}

  std::optional<Counterexample> check(const Concept& h) override {
    if (!h.is_dfa()) throw InvalidArgument("DFA hypothesis expected");
    return dfa_counterexample(target_, h.dfa(), slack_, rng_);
  }

 private:
  dfa::Dfa target_;
  std::size_t slack_;
  std::mt19937_64 rng_;
};

class GridEquivalence final : public EquivalenceOracle {
 public:
  GridEquivalence(monotone::GridFamily family, Point target) : family_(family), target_(std::move(target)) {}

  std::optional<Counterexample> check(const Concept& h) override {
    if (h.is_dfa()) throw InvalidArgument("threshold hypothesis expected");
    auto r = monotone::grid_equivalence(family_, h.threshold().theta(), target_);
    if (!r) return std::nullopt;
    return Counterexample{r->first, r->second};
  }

 private:
  monotone::GridFamily family_;
  Point target_;
};

}  // namespace

std::unique_ptr<Teacher> random_memrep_order(Membership target, RandomOrderParams params) {
  return std::make_unique<RandomMemrepOrder>(std::move(target), params);
}

std::unique_ptr<Teacher> tomita_semantic_order(dfa::Dfa target) {
  return std::make_unique<TomitaSemanticOrder>(std::move(target));
}

std::unique_ptr<Teacher> cost_threshold_oracle(std::function<Rational(const Atom&)> cost, Rational delta) {
  return std::make_unique<CostThreshold>(std::move(cost), delta);
}

std::unique_ptr<Teacher> with_noise(std::unique_ptr<Teacher> inner, double eps, std::uint64_t seed) {
  return std::make_unique<Noisy>(std::move(inner), eps, seed);
}

std::optional<Counterexample> dfa_counterexample(const dfa::Dfa& target, const dfa::Dfa& hypothesis, std::size_t slack,
                                                 std::mt19937_64& rng) {
  auto w = dfa::sample_accepted(dfa::symmetric_difference(target, hypothesis), slack, rng);
  if (!w) return std::nullopt;
  return Counterexample{*w, target.accepts(*w) ? MemLabel::Member : MemLabel::NonMember};
}

std::unique_ptr<EquivalenceOracle> dfa_equivalence(dfa::Dfa target, std::size_t slack, std::uint64_t seed) {
  return std::make_unique<DfaEquivalence>(std::move(target), slack, seed);
}

std::unique_ptr<EquivalenceOracle> grid_equivalence_oracle(monotone::GridFamily family, Point target) {
  return std::make_unique<GridEquivalence>(family, std::move(target));
}

}  // namespace memrep::oracles
