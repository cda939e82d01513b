#pragma once

// Instance generators and property checks shared by the unit tests and the
// acceptance runner.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mtsplace/mtsplace.hpp"

namespace mtsplace::testing {

struct PropertyReport {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline ChannelSet toy_channels() {
  std::ifstream in(std::string(MTSPLACE_DATA_DIR) + "/toy_channels.csv");
  return read_channel_set(in);
}

/// i.i.d. CN(0,1) channels (direct link included).
inline ChannelSet gaussian_instance(std::size_t m_count, std::size_t l_count, SeededRng& rng) {
  ChannelSet set(rng.complex_gaussian(), m_count, l_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t l = 0; l < l_count; ++l) set.set(m, l, rng.complex_gaussian());
  }
  return set;
}

/// One receiver's channels from the ceiling simulator with a small atom count.
inline ChannelSet simulated_instance(std::size_t m_count, std::size_t l_count, std::uint64_t seed,
                                     std::uint64_t stream, std::size_t atoms = 16) {
  GeometryConfig cfg;
  const auto [mx, my] = grid_for(m_count, 5);
  cfg.grid_mx = mx;
  cfg.grid_my = my;
  cfg.l_count = l_count;
  cfg.atoms_per_mts = atoms;
  Geometry g = build_geometry(cfg);
  SeededRng rng(seed, stream);
  draw_actuators(g, 1, rng);
  return sample_channels(g, FadingParams{}, rng).user(0);
}

inline ChannelSet rotated(const ChannelSet& in, ComplexGain factor) {
  ChannelSet out(in.direct() * factor, in.m_count(), in.l_count());
  for (std::size_t m = 0; m < in.m_count(); ++m) {
    for (std::size_t l = 0; l < in.l_count(); ++l) out.set(m, l, in(m, l) * factor);
  }
  return out;
}

/// solve_single matches exhaustive search to 1e-12 relative on simulator
/// instances with M in 1..6 and L in 1..5.
inline PropertyReport check_oracle_equivalence(std::size_t instances, std::uint64_t seed,
                                               double* worst_rel = nullptr) {
  PropertyReport report;
  double worst = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t m_count = 1 + k % 6;
    const std::size_t l_count = 1 + (k / 6) % 5;
    const ChannelSet ch = simulated_instance(m_count, l_count, seed, k);
    const double fast = evaluate_objective(ch, solve_single(ch).placement);
    const double exact = evaluate_objective(ch, solve_brute_force(ch).placement);
    const double rel = rel_diff(fast, exact);
    worst = std::max(worst, rel);
    if (rel > 1e-12) {
      report.fail("instance " + std::to_string(k) + " (M=" + std::to_string(m_count) + ", L=" +
                  std::to_string(l_count) + "): relative gap " + std::to_string(rel));
    }
  }
  if (worst_rel != nullptr) *worst_rel = worst;
  return report;
}

/// g(X, mu) <= f(X) for all mu, with equality at mu = -arg(total).
inline PropertyReport check_bound_tightness(std::size_t instances, std::uint64_t seed) {
  PropertyReport report;
  SeededRng rng(seed, 0);
  for (std::size_t k = 0; k < instances; ++k) {
    const ChannelSet ch = gaussian_instance(1 + k % 5, 1 + k % 4, rng);
    std::vector<std::size_t> chosen(ch.m_count());
    for (auto& p : chosen) p = rng.uniform_index(ch.l_count());
    const Placement x(chosen);
    const double f = evaluate_objective(ch, x);
    for (int t = 0; t < 8; ++t) {
      const double mu = rng.uniform(0.0, kTwoPi);
      if (g_value(ch, x, mu) > f * (1.0 + 1e-15)) report.fail("g exceeds f at instance " + std::to_string(k));
    }
    ComplexGain total = ch.direct();
    for (std::size_t m = 0; m < ch.m_count(); ++m) total += ch(m, x[m]);
    const double tight = g_value(ch, x, -std::arg(total));
    if (rel_diff(tight, f) > 1e-12) report.fail("bound not tight at instance " + std::to_string(k));
  }
  return report;
}

/// Any two angles strictly inside one arc select the same placement.
inline PropertyReport check_arc_stability(std::size_t instances, std::uint64_t seed) {
  PropertyReport report;
  SeededRng rng(seed, 1);
  for (std::size_t k = 0; k < instances; ++k) {
    const ChannelSet ch = gaussian_instance(1 + k % 4, 2 + k % 4, rng);
    for (const auto& arc : evaluate_arcs(ch)) {
      const double width = arc.end - arc.start;
      if (width < 1e-9) continue;
      const double a = arc.start + width * rng.uniform(0.01, 0.99);
      const double b = arc.start + width * rng.uniform(0.01, 0.99);
      if (optimal_placement_for_mu(ch, a) != optimal_placement_for_mu(ch, b)) {
        report.fail("placement changes inside an arc of instance " + std::to_string(k));
      }
    }
  }
  return report;
}

/// Common phase rotation and positive scaling leave the optimum unchanged.
inline PropertyReport check_rotation_scale_covariance(std::size_t instances, std::uint64_t seed) {
  PropertyReport report;
  SeededRng rng(seed, 2);
  for (std::size_t k = 0; k < instances; ++k) {
    const ChannelSet ch = gaussian_instance(1 + k % 6, 1 + k % 5, rng);
    const SolveResult base = solve_single(ch);
    const ChannelSet rot = rotated(ch, std::polar(1.0, rng.uniform(0.0, kTwoPi)));
    const SolveResult r = solve_single(rot);
    if (rel_diff(r.objective, base.objective) > 1e-12) {
      report.fail("rotation changed the objective at instance " + std::to_string(k));
    }
    if (r.placement != base.placement &&
        rel_diff(evaluate_objective(ch, r.placement), base.objective) > 1e-12) {
      report.fail("rotation changed a unique optimum at instance " + std::to_string(k));
    }
    const double c = rng.uniform(1e-3, 1e3);
    const SolveResult s = solve_single(rotated(ch, {c, 0.0}));
    if (rel_diff(s.objective, c * base.objective) > 1e-12) {
      report.fail("scaling by c did not scale the objective at instance " + std::to_string(k));
    }
    if (s.placement != base.placement &&
        rel_diff(evaluate_objective(ch, s.placement), base.objective) > 1e-12) {
      report.fail("scaling changed a unique optimum at instance " + std::to_string(k));
    }
  }
  return report;
}

/// Every tally row sums to the number of ballots.
inline PropertyReport check_vote_conservation(std::size_t instances, std::uint64_t seed) {
  PropertyReport report;
  SeededRng rng(seed, 3);
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t m_count = 1 + k % 7;
    const std::size_t l_count = 1 + k % 5;
    const std::size_t users = 1 + k % 9;
    std::vector<Placement> ballots;
    for (std::size_t u = 0; u < users; ++u) {
      std::vector<std::size_t> chosen(m_count);
      for (auto& p : chosen) p = rng.uniform_index(l_count);
      ballots.emplace_back(chosen);
    }
    const VoteTally tally = tally_votes(ballots, l_count);
    for (std::size_t m = 0; m < m_count; ++m) {
      std::size_t sum = 0;
      for (std::size_t l = 0; l < l_count; ++l) sum += tally.count(m, l);
      if (sum != users) report.fail("row sum != U at instance " + std::to_string(k));
    }
  }
  return report;
}

/// Same (seed, stream) reproduces channels; experiment output ignores thread count.
inline PropertyReport check_rng_reproducibility(std::uint64_t seed) {
  PropertyReport report;
  GeometryConfig gc;
  gc.grid_mx = 3;
  gc.grid_my = 2;
  gc.atoms_per_mts = 9;
  Geometry g = build_geometry(gc);
  auto draw = [&](std::uint64_t stream) {
    Geometry copy = g;
    SeededRng rng(seed, stream);
    draw_actuators(copy, 3, rng);
    return sample_channels(copy, FadingParams{}, rng);
  };
  if (!(draw(5) == draw(5))) report.fail("same stream gave different channels");
  if (draw(5) == draw(6)) report.fail("different streams gave identical channels");

  ExperimentConfig cfg;
  cfg.geometry = gc;
  cfg.trials = 12;
  cfg.seed = seed;
  cfg.sweep_values = {4, 6};
  cfg.methods = {MethodId::kProposedSingle, MethodId::kCmp, MethodId::kRmp, MethodId::kFix};
  cfg.threads = 1;
  const auto serial = run_experiment(cfg);
  cfg.threads = 4;
  const auto parallel = run_experiment(cfg);
  for (std::size_t c = 0; c < serial.cells.size(); ++c) {
    if (serial.cells[c].boost_db != parallel.cells[c].boost_db) {
      report.fail("thread count changed experiment output");
    }
  }
  return report;
}

}  // namespace mtsplace::testing
