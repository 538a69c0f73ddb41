#include "memrep/strategy/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "memrep/core/error.hpp"

namespace memrep::strategy {

double CostModel::scale() const {
  if (!membership_allowed()) return b;
  if (!preference_allowed()) return a;
  return std::max(a, b);
}

double CostModel::total(std::size_t n_mem, std::size_t n_pref) const {
  double t = 0;
  if (n_mem) t += a * static_cast<double>(n_mem);
  if (n_pref) t += b * static_cast<double>(n_pref);
  return t;
}

void CostModel::validate() const {
  if (!(a > 0) || !(b > 0)) throw InvalidArgument("query costs must be positive");
  if (!membership_allowed() && !preference_allowed()) throw InvalidArgument("at least one query cost must be finite");
}

double loss(const CostModel& costs, double c, double size_before, double size_after) {
  if (size_before <= 0) throw InvalidArgument("concept count before a query must be positive");
  const double l = c / costs.scale() * (size_after / size_before);
  return std::clamp(l, 0.0, 1.0);
}

Advice softmax_advice(const std::array<double, 2>& losses, const Availability& available, double temperature) {
  Advice out{0.0, 0.0};
  if (!available[0] && !available[1]) throw InvalidArgument("no arm available");
  double lo = kInfinity;
  for (std::size_t i = 0; i < 2; ++i)
    if (available[i]) lo = std::min(lo, losses[i]);
  double sum = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (!available[i]) continue;
    out[i] = std::exp(-(losses[i] - lo) / temperature);
    sum += out[i];
  }
  for (auto& p : out) p /= sum;
  return out;
}

double BanditState::average_loss(Arm arm) const {
  const auto i = static_cast<std::size_t>(arm);
  return pulls[i] ? loss_sum[i] / static_cast<double>(pulls[i]) : 0.0;
}

Advice pessimistic_advice(const std::array<double, 2>& worst_losses, const Availability& available, double temperature) {
  return softmax_advice(worst_losses, available, temperature);
}

Advice historical_advice(const BanditState& state, const Availability& available, double temperature) {
  return softmax_advice({state.average_loss(Arm::Membership), state.average_loss(Arm::Preference)}, available,
                        temperature);
}

Draw exp4_draw(const BanditState& state, const std::array<Advice, 2>& advice, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double total = state.weights[0] + state.weights[1];
  const std::size_t expert = u(rng) * total < state.weights[0] ? 0 : 1;
  const Arm arm = u(rng) < advice[expert][0] ? Arm::Membership : Arm::Preference;
  const auto a = static_cast<std::size_t>(arm);
  const double p = (state.weights[0] * advice[0][a] + state.weights[1] * advice[1][a]) / total;
  return {expert, arm, p};
}

void exp4_update(BanditState& state, const std::array<Advice, 2>& advice, Arm arm, double probability, double loss,
                 double eta) {
  if (loss < 0 || loss > 1) throw InvalidArgument("loss outside [0,1]");
  const auto a = static_cast<std::size_t>(arm);
  const double estimate = probability > 0 ? loss / probability : 0.0;
  for (std::size_t e = 0; e < 2; ++e) state.weights[e] *= std::exp(-eta * advice[e][a] * estimate);
  const double top = std::max(state.weights[0], state.weights[1]);
  for (auto& w : state.weights) w = std::max(w / top, 1e-300);
  state.loss_sum[a] += loss;
  ++state.pulls[a];
}

std::size_t mem_survivors(const Table& table, std::size_t x, bool member) {
  std::size_t n = 0;
  for (const auto& row : table) n += row[x] == member;
  return n;
}

std::size_t pref_survivors(const Table& table, std::size_t y, std::size_t z, int outcome) {
  std::size_t n = 0;
  for (const auto& row : table) {
    const bool a = row[y], b = row[z];
    switch (outcome) {
      case 0: n += a <= b; break;
      case 1: n += a >= b; break;
      case 2: n += a == b; break;
      default: ++n;
    }
  }
  return n;
}

namespace {

std::size_t mem_worst(const Table& t, std::size_t x) { return std::max(mem_survivors(t, x, true), mem_survivors(t, x, false)); }

std::size_t pref_worst(const Table& t, std::size_t y, std::size_t z) {
  std::size_t w = 0;
  for (int o = 0; o < 3; ++o) w = std::max(w, pref_survivors(t, y, z, o));
  return w;
}

}  // namespace

ArmChoice select_arms(const Table& table, std::size_t psi, std::span<const Atom> atoms,
                      std::span<const bool> mem_allowed, const std::vector<std::vector<bool>>& pair_allowed) {
  const Table head(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(std::min(psi, table.size())));
  const std::size_t n = atoms.size();
  std::vector<std::size_t> order(n), keys(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return canonical_less(atoms[l], atoms[r]); });
  for (std::size_t r = 0; r < n; ++r) keys[order[r]] = r;
  ArmChoice out;
  std::tuple<std::size_t, std::size_t, std::size_t> best_mem;
  for (std::size_t x = 0; x < n; ++x) {
    if (!mem_allowed[x]) continue;
    auto score = std::make_tuple(mem_worst(head, x), mem_worst(table, x), keys[x]);
    if (!out.has_mem || score < best_mem) {
      best_mem = score;
      out.x = x;
      out.mem_worst = std::get<1>(score);
      out.has_mem = true;
    }
  }
  std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> best_pref;
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t z = 0; z < n; ++z) {
      if (keys[y] >= keys[z] || !pair_allowed[y][z]) continue;
      auto score = std::make_tuple(pref_worst(head, y, z), pref_worst(table, y, z), keys[y], keys[z]);
      if (!out.has_pref || score < best_pref) {
        best_pref = score;
        out.y = y;
        out.z = z;
        out.pref_worst = std::get<1>(score);
        out.has_pref = true;
      }
    }
  return out;
}

}  // namespace memrep::strategy
