#pragma once

// Single-receiver MTS placement.
//
// The objective |h0 + sum_m h_{m,l_m}| is lower-bounded by Re{mu (...)} for any
// unit-modulus mu, with equality when mu cancels the phase of the sum. For a
// fixed mu the bound decouples per MTS, so the placement is a per-row argmax.
// That argmax only changes when mu crosses an angle where two candidates of
// one row have equal rotated real part; sweeping the arcs between those
// angles visits every placement that can be optimal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mtsplace/channels.hpp"

namespace mtsplace {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Pairs whose channel difference is at or below this magnitude are skipped
/// when enumerating transition angles.
inline constexpr double kDegeneratePairEps = 1e-300;

/// Default cap on L^M for exhaustive enumeration.
inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

/// Reduces an angle to [0, 2*pi).
inline double wrap_angle(double angle) noexcept {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Sorted angles of all candidate transition points, each in [0, 2*pi).
struct AngleCandidateList {
  std::vector<double> angles;
};

struct SolveResult {
  Placement placement;
  double objective = 0.0;
  /// Angle of the rotation that produced the winner.
  double mu_angle = 0.0;
  std::uint64_t candidates_evaluated = 0;
};

/// |h0 + sum_m h_{m, placement[m]}|.
inline double evaluate_objective(const ChannelSet& channels, const Placement& placement) {
  placement.validate(channels.m_count(), channels.l_count());
  ComplexGain sum = channels.direct();
  for (std::size_t m = 0; m < channels.m_count(); ++m) sum += channels(m, placement[m]);
  return std::abs(sum);
}

/// Re{e^{j mu_angle} (h0 + sum_m h_{m, placement[m]})}; never exceeds the objective.
inline double g_value(const ChannelSet& channels, const Placement& placement, double mu_angle) {
  placement.validate(channels.m_count(), channels.l_count());
  ComplexGain sum = channels.direct();
  for (std::size_t m = 0; m < channels.m_count(); ++m) sum += channels(m, placement[m]);
  return (std::polar(1.0, mu_angle) * sum).real();
}

namespace detail {

// Index of the largest Re{mu h} in a row, mu = cos_mu + j sin_mu; lowest index wins ties.
inline std::size_t best_in_row(std::span<const ComplexGain> row, double cos_mu,
                               double sin_mu) noexcept {
  std::size_t best = 0;
  double best_proj = cos_mu * row[0].real() - sin_mu * row[0].imag();
  for (std::size_t l = 1; l < row.size(); ++l) {
    const double proj = cos_mu * row[l].real() - sin_mu * row[l].imag();
    if (proj > best_proj) {
      best_proj = proj;
      best = l;
    }
  }
  return best;
}

struct TransitionPoint {
  double angle;
  std::size_t m;
  std::size_t l_a;
  std::size_t l_b;
};

// Every angle where a pair of candidates in one row ties in rotated real part,
// sorted by angle (ties ordered by row, then pair, for determinism).
inline std::vector<TransitionPoint> transition_points(const ChannelSet& channels) {
  const std::size_t m_count = channels.m_count();
  const std::size_t l_count = channels.l_count();
  std::vector<TransitionPoint> points;
  points.reserve(m_count * l_count * (l_count > 0 ? l_count - 1 : 0));
  constexpr double half_pi = 0.5 * std::numbers::pi;
  constexpr double three_half_pi = 1.5 * std::numbers::pi;
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto row = channels.row(m);
    for (std::size_t a = 0; a < l_count; ++a) {
      for (std::size_t b = a + 1; b < l_count; ++b) {
        const ComplexGain diff = row[a] - row[b];
        if (std::abs(diff) <= kDegeneratePairEps) continue;
        const double phase = std::arg(diff);
        points.push_back({wrap_angle(half_pi - phase), m, a, b});
        points.push_back({wrap_angle(three_half_pi - phase), m, a, b});
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const TransitionPoint& x, const TransitionPoint& y) {
    if (x.angle != y.angle) return x.angle < y.angle;
    if (x.m != y.m) return x.m < y.m;
    if (x.l_a != y.l_a) return x.l_a < y.l_a;
    return x.l_b < y.l_b;
  });
  return points;
}

// Transition angles closer than this are swept as a single event.
inline constexpr double kCoincidentAngle = 1e-13;

}  // namespace detail

/// Per-MTS argmax of Re{e^{j mu_angle} h_{m,l}}, lowest index on ties.
inline Placement optimal_placement_for_mu(const ChannelSet& channels, double mu_angle) {
  const double c = std::cos(mu_angle);
  const double s = std::sin(mu_angle);
  std::vector<std::size_t> chosen(channels.m_count());
  for (std::size_t m = 0; m < channels.m_count(); ++m) {
    chosen[m] = detail::best_in_row(channels.row(m), c, s);
  }
  return Placement(std::move(chosen));
}

inline AngleCandidateList transition_candidates(const ChannelSet& channels) {
  AngleCandidateList out;
  const auto points = detail::transition_points(channels);
  out.angles.reserve(points.size());
  for (const auto& p : points) out.angles.push_back(p.angle);
  return out;
}

/// One xi-arc of the sweep: [start, end) in radians (end may exceed 2*pi on
/// the wrap-around arc), its midpoint and the placement chosen there.
struct ArcEvaluation {
  double start = 0.0;
  double end = 0.0;
  double mu_angle = 0.0;
  Placement placement;
  double objective = 0.0;
};

/// Evaluates every arc from scratch, in ascending order, wrap-around arc last.
/// O(M^2 L^3); meant for inspection and small inputs.
inline std::vector<ArcEvaluation> evaluate_arcs(const ChannelSet& channels) {
  const auto angles = transition_candidates(channels).angles;
  std::vector<ArcEvaluation> arcs;
  if (angles.empty()) {
    ArcEvaluation a;
    a.end = kTwoPi;
    a.placement = optimal_placement_for_mu(channels, 0.0);
    a.objective = evaluate_objective(channels, a.placement);
    arcs.push_back(std::move(a));
    return arcs;
  }
  arcs.reserve(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) {
    ArcEvaluation a;
    a.start = angles[k];
    a.end = k + 1 < angles.size() ? angles[k + 1] : angles.front() + kTwoPi;
    a.mu_angle = wrap_angle(0.5 * (a.start + a.end));
    a.placement = optimal_placement_for_mu(channels, a.mu_angle);
    a.objective = evaluate_objective(channels, a.placement);
    arcs.push_back(std::move(a));
  }
  return arcs;
}

/// Globally optimal placement in O(M L^2 log(ML)) time.
///
/// Sweeps the arcs between consecutive transition angles (the wrap-around arc
/// included). The per-row winner is tracked incrementally: a row is re-scanned
/// only when an event involves its current winner, since the argmax cannot
/// change at a crossing between two losers. The sweep starts inside the widest
/// arc so the initial state is numerically unambiguous.
inline SolveResult solve_single(const ChannelSet& channels) {
  const auto events = detail::transition_points(channels);
  SolveResult result;
  if (events.empty()) {
    result.placement = optimal_placement_for_mu(channels, 0.0);
    result.objective = evaluate_objective(channels, result.placement);
    result.mu_angle = 0.0;
    result.candidates_evaluated = 1;
    return result;
  }

  const std::size_t count = events.size();

  // Rotate so the sweep begins right after the widest gap.
  std::size_t start = 0;
  double widest = events.front().angle + kTwoPi - events.back().angle;
  for (std::size_t k = 1; k < count; ++k) {
    const double gap = events[k].angle - events[k - 1].angle;
    if (gap > widest) {
      widest = gap;
      start = k;
    }
  }
  auto unwrapped = [&](std::size_t k) {
    const std::size_t idx = (start + k) % count;
    return events[idx].angle + (start + k >= count ? kTwoPi : 0.0);
  };
  auto event_at = [&](std::size_t k) -> const detail::TransitionPoint& {
    return events[(start + k) % count];
  };

  const double initial_mu = unwrapped(0) - 0.5 * widest;
  Placement current = optimal_placement_for_mu(channels, initial_mu);
  ComplexGain sum = channels.direct();
  for (std::size_t m = 0; m < channels.m_count(); ++m) sum += channels(m, current[m]);

  result.placement = current;
  result.objective = evaluate_objective(channels, current);
  result.mu_angle = wrap_angle(initial_mu);
  result.candidates_evaluated = count;
  bool changed_since_exact = false;

  std::vector<std::size_t> dirty_rows;
  std::size_t i = 0;
  while (i < count) {
    std::size_t j = i;
    const double group_start = unwrapped(i);
    while (j + 1 < count && unwrapped(j + 1) - group_start <= detail::kCoincidentAngle) ++j;
    if (j + 1 == count) break;  // the arc after the last group is the initial arc

    dirty_rows.clear();
    for (std::size_t k = i; k <= j; ++k) {
      const auto& e = event_at(k);
      if (current[e.m] == e.l_a || current[e.m] == e.l_b) {
        if (std::find(dirty_rows.begin(), dirty_rows.end(), e.m) == dirty_rows.end()) {
          dirty_rows.push_back(e.m);
        }
      }
    }

    const double mid = 0.5 * (unwrapped(j) + unwrapped(j + 1));
    if (!dirty_rows.empty()) {
      const double c = std::cos(mid);
      const double s = std::sin(mid);
      for (std::size_t m : dirty_rows) {
        const std::size_t winner = detail::best_in_row(channels.row(m), c, s);
        if (winner != current[m]) {
          sum += channels(m, winner) - channels(m, current[m]);
          current[m] = winner;
          changed_since_exact = true;
        }
      }
    }

    // The running sum only screens; the decision uses the exact objective.
    if (changed_since_exact && std::abs(sum) > result.objective * (1.0 - 1e-9)) {
      const double exact = evaluate_objective(channels, current);
      changed_since_exact = false;
      if (exact > result.objective) {
        result.objective = exact;
        result.placement = current;
        result.mu_angle = wrap_angle(mid);
      }
    }
    i = j + 1;
  }
  return result;
}

/// Exhaustive search over all L^M placements. Ties go to the lexicographically
/// smallest placement. Throws ResourceLimitError when L^M exceeds `cap`.
inline SolveResult solve_brute_force(const ChannelSet& channels,
                                     std::uint64_t cap = kDefaultBruteForceCap) {
  const std::size_t m_count = channels.m_count();
  const std::size_t l_count = channels.l_count();

  std::uint64_t total = 1;
  for (std::size_t m = 0; m < m_count; ++m) {
    if (total > cap / l_count) {
      throw ResourceLimitError("brute force: L^M = " + std::to_string(l_count) + "^" +
                               std::to_string(m_count) + " exceeds the cap of " +
                               std::to_string(cap) + " placements");
    }
    total *= l_count;
  }
  if (total > cap) {
    throw ResourceLimitError("brute force: L^M exceeds the cap of " + std::to_string(cap) +
                             " placements");
  }

  std::vector<std::size_t> digits(m_count, 0);
  std::vector<ComplexGain> prefix(m_count + 1);
  prefix[0] = channels.direct();
  for (std::size_t m = 0; m < m_count; ++m) prefix[m + 1] = prefix[m] + channels(m, 0);

  std::vector<std::size_t> best_digits = digits;
  double best_norm = std::norm(prefix[m_count]);
  ComplexGain best_sum = prefix[m_count];

  while (true) {
    // Odometer increment, last MTS fastest.
    std::size_t m = m_count;
    while (m > 0) {
      --m;
      if (++digits[m] < l_count) break;
      digits[m] = 0;
      if (m == 0) {
        m = m_count;  // wrapped past the first digit
        break;
      }
    }
    if (m == m_count) break;
    for (std::size_t k = m; k < m_count; ++k) prefix[k + 1] = prefix[k] + channels(k, digits[k]);

    const double norm = std::norm(prefix[m_count]);
    if (norm > best_norm) {
      best_norm = norm;
      best_digits = digits;
      best_sum = prefix[m_count];
    }
  }

  SolveResult result;
  result.placement = Placement(std::move(best_digits));
  result.objective = evaluate_objective(channels, result.placement);
  result.mu_angle = wrap_angle(-std::arg(best_sum));
  result.candidates_evaluated = total;
  return result;
}

}  // namespace mtsplace
