#pragma once

// Ceiling geometry and Rician channel generation for Monte-Carlo runs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtsplace/channels.hpp"

namespace mtsplace {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kDefaultCarrierHz = 2.6e9;
inline constexpr double kDefaultWavelength = kSpeedOfLight / kDefaultCarrierHz;

/// Rician factors at or above this are treated as a pure line-of-sight link.
inline constexpr double kPureLosDelta = 1e12;

/// Deterministic random source keyed by (seed, stream).
///
/// Distinct streams are statistically independent, so parallel work units
/// that each own a stream reproduce sequential results exactly.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
  ComplexGain complex_gaussian(double variance = 1.0) {
    const double sd = std::sqrt(0.5 * variance);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {sd * re, sd * im};
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Inputs to build_geometry. Lengths in meters.
struct GeometryConfig {
  double ceiling_x = 100.0;
  double ceiling_y = 20.0;
  double height = 5.0;
  std::size_t grid_mx = 6;
  std::size_t grid_my = 5;
  std::size_t l_count = 6;
  std::size_t atoms_per_mts = 100;
  double wavelength = kDefaultWavelength;
  /// Defaults to the midpoint of the x = 0 ceiling edge.
  std::optional<Vec3> controller;
};

/// Ceiling grid with M = grid_mx * grid_my cells, L candidate positions per
/// cell and N meta-atoms per MTS.
///
/// MTS m covers cell (m % grid_mx, m / grid_mx). Candidate l sits on the cell's
/// x-axis centerline at x-fraction (2l + 1) / (2L). Atoms form a
/// ceil(sqrt(N))-wide square grid with half-wavelength pitch, filled row by row
/// and centered on the candidate point.
struct Geometry {
  double ceiling_x = 0.0;
  double ceiling_y = 0.0;
  double height = 0.0;
  std::size_t grid_mx = 0;
  std::size_t grid_my = 0;
  std::size_t l_count = 0;
  std::size_t atoms_per_mts = 0;
  double wavelength = 0.0;
  Vec3 controller;
  std::vector<Vec3> candidates;    // index m * L + l
  std::vector<Vec3> atom_offsets;  // relative to the candidate point
  std::vector<Vec3> actuators;

  [[nodiscard]] std::size_t m_count() const noexcept { return grid_mx * grid_my; }
  [[nodiscard]] const Vec3& candidate(std::size_t m, std::size_t l) const noexcept {
    return candidates[m * l_count + l];
  }
  [[nodiscard]] Vec3 atom_position(std::size_t m, std::size_t l, std::size_t n) const noexcept {
    const Vec3& c = candidate(m, l);
    const Vec3& o = atom_offsets[n];
    return {c.x + o.x, c.y + o.y, c.z + o.z};
  }
  /// Edge length of the square atom grid.
  [[nodiscard]] double mts_width() const noexcept {
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(atoms_per_mts))));
    return static_cast<double>(side) * wavelength / 2.0;
  }
};

inline Geometry build_geometry(const GeometryConfig& cfg) {
  if (!(cfg.ceiling_x > 0.0) || !(cfg.ceiling_y > 0.0) || !(cfg.height > 0.0) ||
      !(cfg.wavelength > 0.0)) {
    throw std::invalid_argument("geometry: ceiling dimensions, height and wavelength must be positive");
  }
  if (cfg.grid_mx == 0 || cfg.grid_my == 0 || cfg.l_count == 0 || cfg.atoms_per_mts == 0) {
    throw std::invalid_argument("geometry: grid_mx, grid_my, L and N must be positive");
  }

  Geometry g;
  g.ceiling_x = cfg.ceiling_x;
  g.ceiling_y = cfg.ceiling_y;
  g.height = cfg.height;
  g.grid_mx = cfg.grid_mx;
  g.grid_my = cfg.grid_my;
  g.l_count = cfg.l_count;
  g.atoms_per_mts = cfg.atoms_per_mts;
  g.wavelength = cfg.wavelength;
  g.controller = cfg.controller.value_or(Vec3{0.0, cfg.ceiling_y / 2.0, cfg.height});

  const double cell_x = cfg.ceiling_x / static_cast<double>(cfg.grid_mx);
  const double cell_y = cfg.ceiling_y / static_cast<double>(cfg.grid_my);
  const double spacing = cell_x / static_cast<double>(cfg.l_count);
  const double width = g.mts_width();
  if (width > spacing || width > cell_y) {
    throw std::invalid_argument(
        "geometry: candidate spacing rule violated: cell_x / L = " + std::to_string(spacing) +
        " m and cell_y = " + std::to_string(cell_y) + " m must both be >= the MTS width of " +
        std::to_string(width) + " m, so neighbouring candidates do not overlap");
  }

  const double two_l = 2.0 * static_cast<double>(cfg.l_count);
  g.candidates.reserve(g.m_count() * cfg.l_count);
  for (std::size_t m = 0; m < g.m_count(); ++m) {
    const double x0 = static_cast<double>(m % cfg.grid_mx) * cell_x;
    const double yc = (static_cast<double>(m / cfg.grid_mx) + 0.5) * cell_y;
    for (std::size_t l = 0; l < cfg.l_count; ++l) {
      const double frac = static_cast<double>(2 * l + 1) / two_l;
      g.candidates.push_back({x0 + frac * cell_x, yc, cfg.height});
    }
  }

  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.atoms_per_mts))));
  const double pitch = cfg.wavelength / 2.0;
  const double center = (static_cast<double>(side) - 1.0) / 2.0;
  g.atom_offsets.reserve(cfg.atoms_per_mts);
  for (std::size_t n = 0; n < cfg.atoms_per_mts; ++n) {
    const double col = static_cast<double>(n % side);
    const double row = static_cast<double>(n / side);
    g.atom_offsets.push_back({(col - center) * pitch, (row - center) * pitch, 0.0});
  }
  return g;
}

/// Replaces the actuator list with `user_count` points drawn uniformly on the floor.
inline void draw_actuators(Geometry& geometry, std::size_t user_count, SeededRng& rng) {
  geometry.actuators.clear();
  geometry.actuators.reserve(user_count);
  for (std::size_t u = 0; u < user_count; ++u) {
    const double x = rng.uniform(0.0, geometry.ceiling_x);
    const double y = rng.uniform(0.0, geometry.ceiling_y);
    geometry.actuators.push_back({x, y, 0.0});
  }
}

enum class PathlossModel { kLos, kNlos };

/// Power gain 10^{-(30 + 22 log10 d)/10} (LoS) or 10^{-(32.6 + 36.7 log10 d)/10} (NLoS).
inline double pathloss(double distance_m, PathlossModel model) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("pathloss: distance must be positive, got " + std::to_string(distance_m));
  }
  const double lg = std::log10(distance_m);
  const double loss_db = model == PathlossModel::kLos ? 30.0 + 22.0 * lg : 32.6 + 36.7 * lg;
  return std::pow(10.0, -loss_db / 10.0);
}

struct LinkModel {
  PathlossModel pathloss = PathlossModel::kLos;
  double rician_delta = 15.0;
};

struct FadingParams {
  LinkModel direct;
  LinkModel reflected;
  double csi_noise_var = 0.0;

  /// Direct link switched to Rayleigh fading with the NLoS pathloss; reflected links unchanged.
  static FadingParams nlos_direct() {
    FadingParams p;
    p.direct = {PathlossModel::kNlos, 0.0};
    return p;
  }

  void validate() const {
    if (!(direct.rician_delta >= 0.0) || !(reflected.rician_delta >= 0.0)) {
      throw std::invalid_argument("fading: Rician factor must be >= 0");
    }
    if (!(csi_noise_var >= 0.0)) throw std::invalid_argument("fading: CSI noise variance must be >= 0");
  }
};

/// One Rician link: sqrt(g) (sqrt(d/(1+d)) e^{-j 2 pi dist / lambda} + sqrt(1/(1+d)) CN(0,1)).
inline ComplexGain sample_link(SeededRng& rng, double distance_m, const LinkModel& link,
                               double wavelength) {
  const double amplitude = std::sqrt(pathloss(distance_m, link.pathloss));
  const ComplexGain los = std::polar(1.0, -2.0 * std::numbers::pi * distance_m / wavelength);
  if (link.rician_delta >= kPureLosDelta) return amplitude * los;
  const double delta = link.rician_delta;
  const ComplexGain scatter = rng.complex_gaussian(1.0);
  return amplitude * (std::sqrt(delta / (1.0 + delta)) * los + std::sqrt(1.0 / (1.0 + delta)) * scatter);
}

/// Per-atom links recorded by sample_channels on request.
struct AtomTrace {
  std::vector<ComplexGain> controller_to_atom;  // [(m * L + l) * N + n]
  std::vector<ComplexGain> atom_to_actuator;    // [((u * M + m) * L + l) * N + n]
};

/// Draws h0 and every cascaded channel for all actuators in `geometry`.
///
/// The controller-to-atom link of each atom is shared by all receivers; each
/// receiver gets its own atom-to-actuator link. Draw order: all direct links,
/// then atoms in (m, l, n) order with that atom's receivers innermost.
inline MultiChannelSet sample_channels(const Geometry& geometry, const FadingParams& params,
                                       SeededRng& rng, AtomTrace* trace = nullptr) {
  params.validate();
  const std::size_t users = geometry.actuators.size();
  if (users == 0) throw std::invalid_argument("sample_channels: geometry has no actuators");
  const std::size_t m_count = geometry.m_count();
  const std::size_t l_count = geometry.l_count;
  const std::size_t n_count = geometry.atoms_per_mts;

  std::vector<ChannelSet> sets;
  sets.reserve(users);
  for (std::size_t u = 0; u < users; ++u) {
    const double d = distance(geometry.controller, geometry.actuators[u]);
    sets.emplace_back(sample_link(rng, d, params.direct, geometry.wavelength), m_count, l_count);
  }
  if (trace != nullptr) {
    trace->controller_to_atom.assign(m_count * l_count * n_count, {});
    trace->atom_to_actuator.assign(users * m_count * l_count * n_count, {});
  }

  std::vector<ComplexGain> acc(users);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t l = 0; l < l_count; ++l) {
      std::fill(acc.begin(), acc.end(), ComplexGain{});
      for (std::size_t n = 0; n < n_count; ++n) {
        const Vec3 atom = geometry.atom_position(m, l, n);
        const ComplexGain f =
            sample_link(rng, distance(geometry.controller, atom), params.reflected, geometry.wavelength);
        if (trace != nullptr) trace->controller_to_atom[(m * l_count + l) * n_count + n] = f;
        for (std::size_t u = 0; u < users; ++u) {
          const ComplexGain g = sample_link(rng, distance(atom, geometry.actuators[u]),
                                            params.reflected, geometry.wavelength);
          if (trace != nullptr) {
            trace->atom_to_actuator[((u * m_count + m) * l_count + l) * n_count + n] = g;
          }
          acc[u] += f * g;
        }
      }
      for (std::size_t u = 0; u < users; ++u) sets[u].set(m, l, acc[u]);
    }
  }
  return MultiChannelSet(std::move(sets));
}

/// Copy of `mcs` with independent CN(0, variance) noise added to every entry.
inline MultiChannelSet perturb_csi(const MultiChannelSet& mcs, double variance, SeededRng& rng) {
  if (!(variance >= 0.0)) {
    throw std::invalid_argument("perturb_csi: variance must be >= 0, got " + std::to_string(variance));
  }
  MultiChannelSet out = mcs;
  if (variance == 0.0) return out;
  for (std::size_t u = 0; u < out.user_count(); ++u) {
    ChannelSet& set = out.user(u);
    set.set_direct(set.direct() + rng.complex_gaussian(variance));
    for (std::size_t m = 0; m < set.m_count(); ++m) {
      for (std::size_t l = 0; l < set.l_count(); ++l) {
        set.set(m, l, set(m, l) + rng.complex_gaussian(variance));
      }
    }
  }
  return out;
}

}  // namespace mtsplace
