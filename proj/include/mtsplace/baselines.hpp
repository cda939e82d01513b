#pragma once

// Comparison placements and SNR-boost metrics.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtsplace/channel_sim.hpp"
#include "mtsplace/channels.hpp"
#include "mtsplace/multi_receiver.hpp"

namespace mtsplace {

enum class MethodId { kProposedSingle, kProposedMulti, kCmp, kRmp, kFix, kOracle };

/// Name used in CSV output and on the command line. Both proposed variants
/// print as "proposed".
constexpr std::string_view method_name(MethodId id) noexcept {
  switch (id) {
    case MethodId::kProposedSingle:
    case MethodId::kProposedMulti: return "proposed";
    case MethodId::kCmp: return "cmp";
    case MethodId::kRmp: return "rmp";
    case MethodId::kFix: return "fix";
    case MethodId::kOracle: return "oracle";
  }
  return "unknown";
}

/// Parses a CLI/CSV method name; "proposed" maps to the single-receiver id.
inline std::optional<MethodId> parse_method(std::string_view name) {
  if (name == "proposed") return MethodId::kProposedSingle;
  if (name == "cmp") return MethodId::kCmp;
  if (name == "rmp") return MethodId::kRmp;
  if (name == "fix") return MethodId::kFix;
  if (name == "oracle") return MethodId::kOracle;
  return std::nullopt;
}

/// Channel matching: each MTS takes the position whose channel has the
/// largest projection onto the direction of h0. With h0 = 0 there is no
/// direction, so the largest magnitude wins.
inline Placement cmp_placement(const ChannelSet& channels) {
  std::vector<std::size_t> chosen(channels.m_count(), 0);
  const ComplexGain h0 = channels.direct();
  const bool has_direction = std::abs(h0) > 0.0;
  const double phase = has_direction ? std::arg(h0) : 0.0;
  const double c = std::cos(-phase);
  const double s = std::sin(-phase);
  for (std::size_t m = 0; m < channels.m_count(); ++m) {
    const auto row = channels.row(m);
    if (has_direction) {
      chosen[m] = detail::best_in_row(row, c, s);
    } else {
      for (std::size_t l = 1; l < row.size(); ++l) {
        if (std::abs(row[l]) > std::abs(row[chosen[m]])) chosen[m] = l;
      }
    }
  }
  return Placement(std::move(chosen));
}

/// CMP run per receiver; the candidate with the best worst-case SNR wins
/// (lowest receiver index on ties).
inline Placement cmp_placement_multi(const MultiChannelSet& mcs, double power_w, double noise_w) {
  Placement best;
  double best_score = -1.0;
  for (const auto& user : mcs.users()) {
    Placement candidate = cmp_placement(user);
    const double score = worst_snr(mcs, candidate, power_w, noise_w);
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

/// The M * L random placements RMP draws, in draw order. Positions are
/// independent and uniform; repeats are allowed.
inline std::vector<Placement> rmp_samples(std::size_t m_count, std::size_t l_count, SeededRng& rng) {
  const std::size_t draws = std::max<std::size_t>(m_count * l_count, 1);
  std::vector<Placement> samples;
  samples.reserve(draws);
  for (std::size_t k = 0; k < draws; ++k) {
    std::vector<std::size_t> chosen(m_count);
    for (auto& p : chosen) p = rng.uniform_index(l_count);
    samples.emplace_back(std::move(chosen));
  }
  return samples;
}

/// Best of M * L random placements by worst-case SNR (first drawn on ties).
/// For a single receiver this is the best SNR.
inline Placement rmp_placement(const MultiChannelSet& mcs, double power_w, double noise_w,
                               SeededRng& rng) {
  auto samples = rmp_samples(mcs.m_count(), mcs.l_count(), rng);
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double score = worst_snr(mcs, samples[k], power_w, noise_w);
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return std::move(samples[best]);
}

inline Placement rmp_placement(const ChannelSet& channels, double power_w, double noise_w,
                               SeededRng& rng) {
  return rmp_placement(MultiChannelSet({channels}), power_w, noise_w, rng);
}

/// Every MTS at its first candidate position.
inline Placement fix_placement(const ChannelSet& channels) {
  return Placement::uniform(channels.m_count(), 0);
}

/// 10 log10(snr_with / snr_without).
inline double snr_boost_db(double snr_with, double snr_without) {
  if (!(snr_with > 0.0) || !(snr_without > 0.0)) {
    throw std::invalid_argument("snr_boost_db: both SNRs must be positive");
  }
  return 10.0 * std::log10(snr_with / snr_without);
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace mtsplace
