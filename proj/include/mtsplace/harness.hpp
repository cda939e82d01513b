#pragma once

// Monte-Carlo driver: sweeps one parameter, samples channels per trial and
// scores every requested method by its SNR boost over the direct link.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "mtsplace/baselines.hpp"
#include "mtsplace/channel_sim.hpp"
#include "mtsplace/multi_receiver.hpp"
#include "mtsplace/optimizer.hpp"

namespace mtsplace {

enum class SweepVar { kM, kL, kN, kU };

constexpr std::string_view sweep_var_name(SweepVar v) noexcept {
  switch (v) {
    case SweepVar::kM: return "M";
    case SweepVar::kL: return "L";
    case SweepVar::kN: return "N";
    case SweepVar::kU: return "U";
  }
  return "?";
}

inline std::optional<SweepVar> parse_sweep_var(std::string_view name) {
  if (name == "M") return SweepVar::kM;
  if (name == "L") return SweepVar::kL;
  if (name == "N") return SweepVar::kN;
  if (name == "U") return SweepVar::kU;
  return std::nullopt;
}

struct ExperimentConfig {
  GeometryConfig geometry;
  std::size_t users = 1;
  SweepVar sweep_var = SweepVar::kM;
  std::vector<std::size_t> sweep_values;  // empty: single point at the base config
  std::vector<MethodId> methods{MethodId::kProposedSingle, MethodId::kCmp, MethodId::kRmp,
                                MethodId::kFix};
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double power_dbm = 30.0;
  double noise_dbm = -80.0;
  bool nlos = false;
  double csi_noise_var = 0.0;
  std::uint64_t brute_force_cap = kDefaultBruteForceCap;
  /// 0 selects the hardware concurrency.
  std::size_t threads = 0;

  void validate() const {
    if (trials == 0) throw std::invalid_argument("config: trials must be >= 1");
    if (users == 0) throw std::invalid_argument("config: users must be >= 1");
    if (methods.empty()) throw std::invalid_argument("config: no methods selected");
    for (std::size_t v : sweep_values) {
      if (v == 0) throw std::invalid_argument("config: sweep values must be positive");
    }
    if (!(csi_noise_var >= 0.0)) throw std::invalid_argument("config: csi_noise_var must be >= 0");
  }

  [[nodiscard]] FadingParams fading() const {
    FadingParams p = nlos ? FadingParams::nlos_direct() : FadingParams{};
    p.csi_noise_var = csi_noise_var;
    return p;
  }
};

/// Splits M cells into grid_mx x grid_my using the largest divisor of M not
/// above `max_rows` as the row count.
inline std::pair<std::size_t, std::size_t> grid_for(std::size_t m_count, std::size_t max_rows) {
  std::size_t rows = std::max<std::size_t>(std::min(max_rows, m_count), 1);
  while (m_count % rows != 0) --rows;
  return {m_count / rows, rows};
}

/// Base config with one sweep value applied.
inline ExperimentConfig apply_sweep_value(const ExperimentConfig& base, std::size_t value) {
  ExperimentConfig cfg = base;
  switch (base.sweep_var) {
    case SweepVar::kM: {
      const auto [mx, my] = grid_for(value, base.geometry.grid_my);
      cfg.geometry.grid_mx = mx;
      cfg.geometry.grid_my = my;
      break;
    }
    case SweepVar::kL: cfg.geometry.l_count = value; break;
    case SweepVar::kN: cfg.geometry.atoms_per_mts = value; break;
    case SweepVar::kU: cfg.users = value; break;
  }
  return cfg;
}

inline std::size_t sweep_base_value(const ExperimentConfig& cfg) {
  switch (cfg.sweep_var) {
    case SweepVar::kM: return cfg.geometry.grid_mx * cfg.geometry.grid_my;
    case SweepVar::kL: return cfg.geometry.l_count;
    case SweepVar::kN: return cfg.geometry.atoms_per_mts;
    case SweepVar::kU: return cfg.users;
  }
  return 0;
}

/// Value at quantile q in [0, 1], linear interpolation between order statistics.
inline double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

/// Per-trial samples of one method at one sweep point.
struct MethodCell {
  std::size_t sweep_value = 0;
  MethodId method = MethodId::kProposedSingle;
  std::vector<double> boost_db;
  std::vector<double> solve_seconds;

  [[nodiscard]] double mean_boost_db() const {
    return boost_db.empty() ? 0.0
                            : std::accumulate(boost_db.begin(), boost_db.end(), 0.0) /
                                  static_cast<double>(boost_db.size());
  }
  [[nodiscard]] double median_boost_db() const { return quantile(boost_db, 0.5); }
  [[nodiscard]] double mean_seconds() const {
    return solve_seconds.empty() ? 0.0
                                 : std::accumulate(solve_seconds.begin(), solve_seconds.end(), 0.0) /
                                       static_cast<double>(solve_seconds.size());
  }
};

struct ExperimentResult {
  SweepVar sweep_var = SweepVar::kM;
  /// Ordered by sweep value, then method as listed in the config.
  std::vector<MethodCell> cells;

  [[nodiscard]] const MethodCell& cell(std::size_t sweep_value, MethodId method) const {
    for (const auto& c : cells) {
      if (c.sweep_value == sweep_value && method_name(c.method) == method_name(method)) return c;
    }
    throw std::out_of_range("no result for " + std::string(sweep_var_name(sweep_var)) + "=" +
                            std::to_string(sweep_value) + " method " + std::string(method_name(method)));
  }
};

namespace detail {

// RNG stream layout: one block per trial, one slot per purpose.
enum class StreamPurpose : std::uint64_t { kChannels = 0, kCsi = 1, kRmp = 2 };

inline std::uint64_t trial_stream(std::size_t trial, StreamPurpose purpose) {
  return static_cast<std::uint64_t>(trial) * 4 + static_cast<std::uint64_t>(purpose);
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  std::mutex error_mutex;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Channels for one trial of `cfg` (fresh actuator positions included).
inline MultiChannelSet sample_trial_channels(const ExperimentConfig& cfg, const Geometry& base,
                                             std::size_t trial) {
  Geometry geometry = base;
  SeededRng rng(cfg.seed, detail::trial_stream(trial, detail::StreamPurpose::kChannels));
  draw_actuators(geometry, cfg.users, rng);
  return sample_channels(geometry, cfg.fading(), rng);
}

/// Placement chosen by `method` from the channels it is allowed to see.
inline Placement run_method(MethodId method, const MultiChannelSet& observed, double power_w,
                            double noise_w, SeededRng& rmp_rng, std::uint64_t brute_force_cap) {
  const bool single = observed.user_count() == 1;
  switch (method) {
    case MethodId::kProposedSingle:
    case MethodId::kProposedMulti:
      return single ? solve_single(observed.user(0)).placement : solve_multi(observed);
    case MethodId::kCmp:
      return single ? cmp_placement(observed.user(0)) : cmp_placement_multi(observed, power_w, noise_w);
    case MethodId::kRmp: return rmp_placement(observed, power_w, noise_w, rmp_rng);
    case MethodId::kFix: return fix_placement(observed.user(0));
    case MethodId::kOracle:
      if (!single) throw std::invalid_argument("oracle method supports a single receiver only");
      return solve_brute_force(observed.user(0), brute_force_cap).placement;
  }
  throw std::logic_error("unhandled method");
}

/// Runs every (sweep value, trial, method) combination.
///
/// Methods optimize on the observed channels (perturbed when csi_noise_var > 0)
/// and are scored on the true channels. Timing covers only the placement
/// computation. Trials run in parallel; each owns its RNG streams, so output
/// does not depend on the thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const double power_w = dbm_to_watts(config.power_dbm);
  const double noise_w = dbm_to_watts(config.noise_dbm);

  std::vector<std::size_t> values = config.sweep_values;
  if (values.empty()) values.push_back(sweep_base_value(config));

  ExperimentResult result;
  result.sweep_var = config.sweep_var;
  for (std::size_t value : values) {
    const ExperimentConfig cfg = apply_sweep_value(config, value);
    const Geometry base = build_geometry(cfg.geometry);

    const std::size_t first_cell = result.cells.size();
    for (MethodId method : cfg.methods) {
      MethodCell cell;
      cell.sweep_value = value;
      cell.method = (method == MethodId::kProposedSingle && cfg.users > 1) ? MethodId::kProposedMulti : method;
      cell.boost_db.assign(cfg.trials, 0.0);
      cell.solve_seconds.assign(cfg.trials, 0.0);
      result.cells.push_back(std::move(cell));
    }

    detail::parallel_for(cfg.trials, cfg.threads, [&](std::size_t trial) {
      const MultiChannelSet truth = sample_trial_channels(cfg, base, trial);
      MultiChannelSet observed;
      if (cfg.csi_noise_var > 0.0) {
        SeededRng csi_rng(cfg.seed, detail::trial_stream(trial, detail::StreamPurpose::kCsi));
        observed = perturb_csi(truth, cfg.csi_noise_var, csi_rng);
      } else {
        observed = truth;
      }
      const double baseline = worst_snr_direct_only(truth, power_w, noise_w);

      for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        SeededRng rmp_rng(cfg.seed, detail::trial_stream(trial, detail::StreamPurpose::kRmp));
        const auto t0 = std::chrono::steady_clock::now();
        const Placement placement =
            run_method(cfg.methods[k], observed, power_w, noise_w, rmp_rng, cfg.brute_force_cap);
        const auto t1 = std::chrono::steady_clock::now();
        MethodCell& cell = result.cells[first_cell + k];
        cell.boost_db[trial] = snr_boost_db(worst_snr(truth, placement, power_w, noise_w), baseline);
        cell.solve_seconds[trial] = std::chrono::duration<double>(t1 - t0).count();
      }
    });
  }
  return result;
}

}  // namespace mtsplace
