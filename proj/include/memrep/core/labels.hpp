#pragma once

#include <cstdint>
#include <string_view>

namespace memrep {

enum class MemLabel : std::uint8_t { Member, NonMember };

/// Less(x, y) reads x ≺ y: y is preferred over x.
enum class PrefLabel : std::uint8_t { Less, Greater, Equiv, Incomparable };

std::string_view to_token(MemLabel label);   // "in" | "out"
std::string_view to_token(PrefLabel label);  // "<" | ">" | "=" | "||"
MemLabel parse_mem_label(std::string_view token);
PrefLabel parse_pref_label(std::string_view token);

inline MemLabel opposite(MemLabel l) {
  return l == MemLabel::Member ? MemLabel::NonMember : MemLabel::Member;
}

}  // namespace memrep
