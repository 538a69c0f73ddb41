#include "memrep/dfa/targets.hpp"

#include <initializer_list>

#include "memrep/core/error.hpp"

namespace memrep::dfa {

namespace {

// rows[q] lists successors in alphabet order.
Dfa table(const Alphabet& alphabet, std::initializer_list<std::initializer_list<State>> rows,
          std::initializer_list<State> accepting) {
  Dfa d(alphabet, rows.size());
  State q = 0;
  for (const auto& row : rows) {
    Symbol a = 0;
    for (State to : row) d.set_transition(q, a++, to);
    ++q;
  }
  for (State f : accepting) d.set_accepting(f, true);
  return d;
}

}  // namespace

Alphabet tile_alphabet() { return Alphabet({"Bl", "Br", "R", "Y"}); }

Dfa ry_prior() {
  // 0 start, 1 recharged, 2 burnt
  return table(tile_alphabet(), {{0, 0, 2, 1}, {1, 1, 2, 1}, {2, 2, 2, 2}}, {1});
}

Dfa bby_task() {
  // 0 dry, 1 wet, 2 recharged, 3 recharged while wet
  return table(tile_alphabet(), {{1, 0, 0, 2}, {1, 0, 1, 3}, {2, 2, 2, 2}, {3, 3, 3, 3}}, {0, 1, 2});
}

Dfa grid_world_task() {
  // 0 dry, 1 wet, 2 done, 3 sink
  return table(tile_alphabet(), {{1, 0, 3, 2}, {1, 0, 3, 3}, {2, 2, 3, 2}, {3, 3, 3, 3}}, {2});
}

Dfa tomita(int n) {
  const Alphabet b = Alphabet::binary();
  switch (n) {
    case 1:  // 1*
      return table(b, {{1, 0}, {1, 1}}, {0});
    case 2:  // (10)*
      return table(b, {{2, 1}, {0, 2}, {2, 2}}, {0});
    case 3:  // no odd run of 1s directly followed by an odd run of 0s
      return table(b, {{0, 1}, {2, 0}, {3, 4}, {2, 1}, {4, 4}}, {0, 1, 3});
    case 4:  // no 000
      return table(b, {{1, 0}, {2, 0}, {3, 0}, {3, 3}}, {0, 1, 2});
    case 5:  // even number of 0s and of 1s
      return table(b, {{1, 2}, {0, 3}, {3, 0}, {2, 1}}, {0});
    case 6:  // #0 - #1 divisible by 3
      return table(b, {{1, 2}, {2, 0}, {0, 1}}, {0});
    case 7:  // 0*1*0*1*
      return table(b, {{0, 1}, {2, 1}, {2, 3}, {4, 3}, {4, 4}}, {0, 1, 2, 3});
    default:
      throw InvalidArgument("Tomita languages are numbered 1 to 7");
  }
}

Dfa modulo_k(std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be positive");
  Dfa d(Alphabet({"0"}), k);
  for (std::size_t q = 0; q < k; ++q) d.set_transition(static_cast<State>(q), 0, static_cast<State>((q + 1) % k));
  d.set_accepting(0, true);
  return d;
}

Dfa scaled_tomita4(std::size_t n) {
  // State q < n + 1 counts trailing zeros; state n + 1 is the sink.
  Dfa d(Alphabet::binary(), n + 2);
  const auto sink = static_cast<State>(n + 1);
  for (State q = 0; q <= n; ++q) {
    d.set_transition(q, 0, q + 1);
    d.set_transition(q, 1, 0);
    d.set_accepting(q, true);
  }
  d.set_transition(sink, 0, sink);
  d.set_transition(sink, 1, sink);
  return d;
}

}  // namespace memrep::dfa
