#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtsplace {

/// Complex channel coefficient (dimensionless amplitude gain).
using ComplexGain = std::complex<double>;

inline bool is_finite(ComplexGain h) noexcept {
  return std::isfinite(h.real()) && std::isfinite(h.imag());
}

/// Thrown when an exhaustive enumeration would exceed its configured size cap.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Channels seen by one receiver: the direct link h0 and an M x L table of
/// reflected channels, one per (MTS, candidate position).
///
/// M = 0 is allowed and means "no MTS deployed"; the objective then reduces to
/// |h0|. For M >= 1 the table must have L >= 1 columns.
class ChannelSet {
 public:
  ChannelSet() = default;

  ChannelSet(ComplexGain direct, std::size_t m_count, std::size_t l_count)
      : direct_(direct), m_count_(m_count), l_count_(m_count == 0 ? 0 : l_count),
        reflected_(m_count_ * l_count_) {
    if (m_count > 0 && l_count == 0) {
      throw std::invalid_argument("ChannelSet: L must be >= 1 when M >= 1");
    }
    if (!is_finite(direct)) {
      throw std::invalid_argument("ChannelSet: direct channel is not finite");
    }
  }

  /// Builds from nested rows; every row must have the same length.
  ChannelSet(ComplexGain direct, const std::vector<std::vector<ComplexGain>>& rows)
      : ChannelSet(direct, rows.size(), rows.empty() ? 0 : rows.front().size()) {
    for (std::size_t m = 0; m < rows.size(); ++m) {
      if (rows[m].size() != l_count_) {
        throw std::invalid_argument("ChannelSet: ragged reflected-channel table");
      }
      for (std::size_t l = 0; l < l_count_; ++l) set(m, l, rows[m][l]);
    }
  }

  [[nodiscard]] ComplexGain direct() const noexcept { return direct_; }
  void set_direct(ComplexGain h) {
    if (!is_finite(h)) throw std::invalid_argument("ChannelSet: direct channel is not finite");
    direct_ = h;
  }

  [[nodiscard]] std::size_t m_count() const noexcept { return m_count_; }
  [[nodiscard]] std::size_t l_count() const noexcept { return l_count_; }

  [[nodiscard]] ComplexGain operator()(std::size_t m, std::size_t l) const noexcept {
    return reflected_[m * l_count_ + l];
  }

  void set(std::size_t m, std::size_t l, ComplexGain h) {
    if (m >= m_count_ || l >= l_count_) {
      throw std::out_of_range("ChannelSet: index (" + std::to_string(m) + ", " +
                              std::to_string(l) + ") out of range");
    }
    if (!is_finite(h)) throw std::invalid_argument("ChannelSet: reflected channel is not finite");
    reflected_[m * l_count_ + l] = h;
  }

  /// Row m of the reflected table (the L candidate channels of MTS m).
  [[nodiscard]] std::span<const ComplexGain> row(std::size_t m) const noexcept {
    return {reflected_.data() + m * l_count_, l_count_};
  }

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;

 private:
  ComplexGain direct_{};
  std::size_t m_count_ = 0;
  std::size_t l_count_ = 0;
  std::vector<ComplexGain> reflected_;
};

/// One chosen candidate position per MTS, stored 0-based.
///
/// The one-position-per-MTS constraint holds by construction; the binary
/// matrix form is available through `is_selected`.
class Placement {
 public:
  Placement() = default;
  explicit Placement(std::vector<std::size_t> chosen) : chosen_(std::move(chosen)) {}

  /// Builds from 1-based indices as written in fixtures and on the command line.
  static Placement from_one_based(std::initializer_list<std::size_t> positions) {
    std::vector<std::size_t> chosen;
    chosen.reserve(positions.size());
    for (std::size_t p : positions) {
      if (p == 0) throw std::invalid_argument("Placement: 1-based index must be >= 1");
      chosen.push_back(p - 1);
    }
    return Placement(std::move(chosen));
  }

  /// Every MTS at the same position.
  static Placement uniform(std::size_t m_count, std::size_t position = 0) {
    return Placement(std::vector<std::size_t>(m_count, position));
  }

  [[nodiscard]] std::size_t size() const noexcept { return chosen_.size(); }
  [[nodiscard]] std::size_t operator[](std::size_t m) const noexcept { return chosen_[m]; }
  std::size_t& operator[](std::size_t m) noexcept { return chosen_[m]; }
  [[nodiscard]] const std::vector<std::size_t>& indices() const noexcept { return chosen_; }

  /// Entry x_{m,l} of the equivalent binary placement matrix.
  [[nodiscard]] bool is_selected(std::size_t m, std::size_t l) const noexcept {
    return chosen_[m] == l;
  }

  /// Throws std::invalid_argument unless this placement fits an M x L table.
  void validate(std::size_t m_count, std::size_t l_count) const {
    if (chosen_.size() != m_count) {
      throw std::invalid_argument("Placement: has " + std::to_string(chosen_.size()) +
                                  " entries, expected M = " + std::to_string(m_count));
    }
    for (std::size_t m = 0; m < chosen_.size(); ++m) {
      if (chosen_[m] >= l_count) {
        throw std::invalid_argument("Placement: position " + std::to_string(chosen_[m] + 1) +
                                    " of MTS " + std::to_string(m + 1) + " exceeds L = " +
                                    std::to_string(l_count));
      }
    }
  }

  /// Comma-separated 1-based indices, e.g. "3,2".
  [[nodiscard]] std::string to_string() const {
    std::string out;
    for (std::size_t m = 0; m < chosen_.size(); ++m) {
      if (m > 0) out += ',';
      out += std::to_string(chosen_[m] + 1);
    }
    return out;
  }

  friend bool operator==(const Placement&, const Placement&) = default;
  friend auto operator<=>(const Placement&, const Placement&) = default;

 private:
  std::vector<std::size_t> chosen_;
};

/// Channels for U receivers sharing one MTS layout.
class MultiChannelSet {
 public:
  MultiChannelSet() = default;
  explicit MultiChannelSet(std::vector<ChannelSet> users) : users_(std::move(users)) {
    if (users_.empty()) throw std::invalid_argument("MultiChannelSet: needs at least one user");
    for (const auto& u : users_) {
      if (u.m_count() != users_.front().m_count() || u.l_count() != users_.front().l_count()) {
        throw std::invalid_argument("MultiChannelSet: users disagree on M or L");
      }
    }
  }

  [[nodiscard]] std::size_t user_count() const noexcept { return users_.size(); }
  [[nodiscard]] std::size_t m_count() const noexcept {
    return users_.empty() ? 0 : users_.front().m_count();
  }
  [[nodiscard]] std::size_t l_count() const noexcept {
    return users_.empty() ? 0 : users_.front().l_count();
  }
  [[nodiscard]] const ChannelSet& user(std::size_t u) const noexcept { return users_[u]; }
  [[nodiscard]] ChannelSet& user(std::size_t u) noexcept { return users_[u]; }
  [[nodiscard]] const std::vector<ChannelSet>& users() const noexcept { return users_; }

  friend bool operator==(const MultiChannelSet&, const MultiChannelSet&) = default;

 private:
  std::vector<ChannelSet> users_;
};

}  // namespace mtsplace
