#include "memrep/monotone/grid.hpp"

#include <algorithm>
#include <set>

#include "memrep/core/consistency.hpp"
#include "memrep/core/error.hpp"

namespace memrep::monotone {

std::size_t GridFamily::size() const {
  std::size_t n = 1;
  for (std::size_t j = 0; j < d; ++j) n *= i;
  return n;
}

Point GridFamily::point(std::size_t flat) const {
  Point p;
  p.coords.resize(d);
  for (std::size_t j = d; j-- > 0;) {
    p.coords[j] = value(flat % i);
    flat /= i;
  }
  return p;
}

std::vector<Point> GridFamily::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t f = 0; f < size(); ++f) out.push_back(point(f));
  return out;
}

bool GridFamily::on_grid(const Point& p) const {
  if (p.dim() != d) return false;
  return std::all_of(p.coords.begin(), p.coords.end(), [&](const Rational& c) {
    const Rational scaled = c * Rational(static_cast<std::int64_t>(i - 1));
    return c >= 0 && c <= 1 && scaled.denominator() == 1;
  });
}

std::size_t grid_resolution(std::size_t size_index) {
  if (size_index == 0 || size_index > 30) throw InvalidArgument("grid size index out of range");
  return (std::size_t{1} << (size_index - 1)) + 1;
}

bool grid_contains(const Point& theta, const Atom& atom) {
  const auto* p = std::get_if<Point>(&atom);
  if (p == nullptr) throw InvalidArgument("grid concepts only contain points");
  if (p->dim() != theta.dim()) {
    throw DimensionMismatch("point of dimension " + std::to_string(p->dim()) + " against threshold of dimension " +
                            std::to_string(theta.dim()));
  }
  for (std::size_t j = 0; j < theta.dim(); ++j) {
    if (p->coords[j] < theta.coords[j]) return false;
  }
  return true;
}

std::string Threshold::serialize() const { return to_string(Atom(theta_), Alphabet{}); }

std::vector<Rational> thresholded_reward_params(std::span<const Rational> w, const Rational& delta) {
  const auto d = static_cast<std::int64_t>(w.size());
  if (d == 0) throw InvalidArgument("weight vector must be non-empty");
  std::vector<Rational> theta;
  for (const Rational& wj : w) {
    if (wj < -1 || wj > 1) throw InvalidArgument("weights must lie in [-1, 1]");
    theta.push_back((1 - wj) / 2);
  }
  if (delta < -d || delta > d) throw InvalidArgument("threshold must lie in [-d, d]");
  theta.push_back((delta / d + 1) / 2);
  return theta;
}

std::optional<std::pair<Atom, MemLabel>> grid_equivalence(const GridFamily& family, const Point& hypothesis,
                                                          const Point& target) {
  if (hypothesis.dim() != family.d || target.dim() != family.d) {
    throw DimensionMismatch("threshold dimension differs from the family");
  }
  if (hypothesis == target) return std::nullopt;
  std::vector<std::vector<Rational>> axes(family.d);
  for (std::size_t j = 0; j < family.d; ++j) {
    std::set<Rational> values{hypothesis.coords[j], target.coords[j]};
    for (std::size_t k = 0; k < family.i; ++k) values.insert(family.value(k));
    axes[j].assign(values.begin(), values.end());
  }
  std::vector<std::size_t> idx(family.d, 0);
  while (true) {
    Point p;
    for (std::size_t j = 0; j < family.d; ++j) p.coords.push_back(axes[j][idx[j]]);
    const bool in_target = grid_contains(target, p);
    if (grid_contains(hypothesis, p) != in_target) {
      return std::pair<Atom, MemLabel>{Atom(std::move(p)), in_target ? MemLabel::Member : MemLabel::NonMember};
    }
    std::size_t j = family.d;
    while (j > 0) {
      --j;
      if (++idx[j] < axes[j].size()) break;
      idx[j] = 0;
      if (j == 0) return std::nullopt;
    }
  }
}

std::vector<Point> grid_consistent_set(const GridFamily& family, const KnowledgeBase& kb) {
  std::vector<Point> out;
  for (std::size_t f = 0; f < family.size(); ++f) {
    Threshold t(family.point(f));
    if (is_consistent(t, kb)) out.push_back(t.theta());
  }
  return out;
}

Point smartcar_params(const Rational& tau, const Rational& T, const Rational& dist, const Rational& D) {
  return Point{{tau / T, (D - dist) / D}};
}

Point smartcar_threshold(const Rational& tau, const Rational& T, const Rational& dist, const Rational& D) {
  return Point{{1 - tau / T, dist / D}};
}

Point smartcar_atom(const Rational& t, const Rational& T, const Rational& m, const Rational& D) {
  return Point{{1 - t / T, m / D}};
}

}  // namespace memrep::monotone
