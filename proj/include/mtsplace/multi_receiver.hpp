#pragma once

// Broadcast to several receivers: each receiver's optimal placement casts one
// vote per MTS and the position with the most votes wins. This is a heuristic
// for the maximin-SNR problem, not an exact solver.

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mtsplace/channels.hpp"
#include "mtsplace/optimizer.hpp"

namespace mtsplace {

/// Per-MTS vote counts; every row sums to the number of ballots.
class VoteTally {
 public:
  VoteTally(std::size_t m_count, std::size_t l_count)
      : m_count_(m_count), l_count_(l_count), counts_(m_count * l_count, 0) {}

  void add(const Placement& ballot) {
    ballot.validate(m_count_, l_count_);
    for (std::size_t m = 0; m < m_count_; ++m) ++counts_[m * l_count_ + ballot[m]];
    ++ballots_;
  }

  [[nodiscard]] std::size_t count(std::size_t m, std::size_t l) const noexcept {
    return counts_[m * l_count_ + l];
  }
  [[nodiscard]] std::size_t ballots() const noexcept { return ballots_; }
  [[nodiscard]] std::size_t m_count() const noexcept { return m_count_; }
  [[nodiscard]] std::size_t l_count() const noexcept { return l_count_; }

  /// Most-voted position per MTS; lowest index on ties.
  [[nodiscard]] Placement winner() const {
    std::vector<std::size_t> chosen(m_count_, 0);
    for (std::size_t m = 0; m < m_count_; ++m) {
      for (std::size_t l = 1; l < l_count_; ++l) {
        if (count(m, l) > count(m, chosen[m])) chosen[m] = l;
      }
    }
    return Placement(std::move(chosen));
  }

 private:
  std::size_t m_count_;
  std::size_t l_count_;
  std::size_t ballots_ = 0;
  std::vector<std::size_t> counts_;
};

/// SNR of one receiver, (P / sigma^2) |h0 + sum_m h_{m, placement[m]}|^2.
inline double snr(const ChannelSet& channels, const Placement& placement, double power_w,
                  double noise_w) {
  if (!(power_w > 0.0) || !(noise_w > 0.0)) {
    throw std::invalid_argument("snr: power and noise must be positive");
  }
  const double gain = evaluate_objective(channels, placement);
  return power_w / noise_w * gain * gain;
}

/// SNR with MTSs absent: only the direct channel contributes.
inline double snr_direct_only(const ChannelSet& channels, double power_w, double noise_w) {
  if (!(power_w > 0.0) || !(noise_w > 0.0)) {
    throw std::invalid_argument("snr: power and noise must be positive");
  }
  return power_w / noise_w * std::norm(channels.direct());
}

/// Minimum SNR over all receivers.
inline double worst_snr(const MultiChannelSet& mcs, const Placement& placement, double power_w,
                        double noise_w) {
  if (!(power_w > 0.0) || !(noise_w > 0.0)) {
    throw std::invalid_argument("worst_snr: power and noise must be positive");
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& user : mcs.users()) worst = std::min(worst, snr(user, placement, power_w, noise_w));
  return worst;
}

/// Minimum direct-only SNR over all receivers.
inline double worst_snr_direct_only(const MultiChannelSet& mcs, double power_w, double noise_w) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& user : mcs.users()) {
    worst = std::min(worst, snr_direct_only(user, power_w, noise_w));
  }
  return worst;
}

inline VoteTally tally_votes(std::span<const Placement> ballots, std::size_t l_count) {
  if (ballots.empty()) throw std::invalid_argument("majority_vote: no placements to vote on");
  VoteTally tally(ballots.front().size(), l_count);
  for (const auto& b : ballots) tally.add(b);
  return tally;
}

/// Position-wise majority over per-user placements. `l_count` defaults to the
/// largest index seen, which suffices for picking a winner.
inline Placement majority_vote(std::span<const Placement> ballots, std::size_t l_count = 0) {
  if (ballots.empty()) throw std::invalid_argument("majority_vote: no placements to vote on");
  if (l_count == 0) {
    for (const auto& b : ballots) {
      for (std::size_t p : b.indices()) l_count = std::max(l_count, p + 1);
    }
    l_count = std::max<std::size_t>(l_count, 1);
  }
  return tally_votes(ballots, l_count).winner();
}

/// Solves each receiver optimally, then majority-votes the results.
inline Placement solve_multi(const MultiChannelSet& mcs) {
  if (mcs.user_count() == 0) throw std::invalid_argument("solve_multi: no users");
  std::vector<Placement> ballots;
  ballots.reserve(mcs.user_count());
  for (const auto& user : mcs.users()) ballots.push_back(solve_single(user).placement);
  return majority_vote(ballots, std::max<std::size_t>(mcs.l_count(), 1));
}

}  // namespace mtsplace
