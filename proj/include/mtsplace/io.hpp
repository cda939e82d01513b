#pragma once

// Text formats.
//
// Channel file, one record per line, 1-based indices, "0,0" is the direct link:
//     m,l,re,im
// Multi-receiver channel file, with a leading 1-based receiver index:
//     u,m,l,re,im
// Blank lines and lines starting with '#' are ignored. Values are written with
// 17 significant digits so a write/read cycle is exact.
//
// Solve result and experiment config use "key = value" lines with '#' comments.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtsplace/baselines.hpp"
#include "mtsplace/channels.hpp"
#include "mtsplace/harness.hpp"
#include "mtsplace/optimizer.hpp"

namespace mtsplace {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ChannelRecord {
  std::size_t user;  // 1-based, 0 when the format has no user column
  std::size_t m;
  std::size_t l;
  ComplexGain value;
  std::size_t line;
};

inline std::vector<ChannelRecord> read_records(std::istream& in, bool with_user) {
  std::vector<ChannelRecord> records;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t fields = with_user ? 5 : 4;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto parts = split(text, ',');
    if (parts.size() != fields) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(fields) +
                        " comma-separated fields, got " + std::to_string(parts.size()));
    }
    std::size_t k = 0;
    ChannelRecord r{};
    r.line = line_no;
    if (with_user) r.user = parse_uint(parts[k++], "receiver index");
    r.m = parse_uint(parts[k++], "MTS index");
    r.l = parse_uint(parts[k++], "position index");
    const double re = parse_double(parts[k++], "real part");
    const double im = parse_double(parts[k++], "imaginary part");
    r.value = {re, im};
    if (!is_finite(r.value)) throw FormatError("line " + std::to_string(line_no) + ": non-finite value");
    if ((r.m == 0) != (r.l == 0)) {
      throw FormatError("line " + std::to_string(line_no) + ": only the direct link may use index 0");
    }
    if (with_user && r.user == 0) throw FormatError("line " + std::to_string(line_no) + ": receivers are 1-based");
    records.push_back(r);
  }
  return records;
}

inline ChannelSet assemble(const std::vector<const ChannelRecord*>& records, std::string_view who) {
  std::size_t m_count = 0;
  std::size_t l_count = 0;
  for (const auto* r : records) {
    m_count = std::max(m_count, r->m);
    l_count = std::max(l_count, r->l);
  }
  ChannelSet set(ComplexGain{}, m_count, l_count);
  std::vector<bool> seen(m_count * l_count + 1, false);
  for (const auto* r : records) {
    const std::size_t slot = r->m == 0 ? m_count * l_count : (r->m - 1) * l_count + (r->l - 1);
    if (seen[slot]) throw FormatError("line " + std::to_string(r->line) + ": duplicate record");
    seen[slot] = true;
    if (r->m == 0) {
      set.set_direct(r->value);
    } else {
      set.set(r->m - 1, r->l - 1, r->value);
    }
  }
  if (!seen[m_count * l_count]) throw FormatError(std::string(who) + ": missing direct channel record 0,0");
  for (std::size_t s = 0; s < m_count * l_count; ++s) {
    if (!seen[s]) {
      throw FormatError(std::string(who) + ": missing record for m=" + std::to_string(s / l_count + 1) +
                        " l=" + std::to_string(s % l_count + 1));
    }
  }
  return set;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline ChannelSet read_channel_set(std::istream& in) {
  const auto records = detail::read_records(in, false);
  std::vector<const detail::ChannelRecord*> ptrs;
  for (const auto& r : records) ptrs.push_back(&r);
  return detail::assemble(ptrs, "channel file");
}

inline void write_channel_set(std::ostream& out, const ChannelSet& set) {
  out << "0,0," << detail::format_double(set.direct().real()) << ','
      << detail::format_double(set.direct().imag()) << '\n';
  for (std::size_t m = 0; m < set.m_count(); ++m) {
    for (std::size_t l = 0; l < set.l_count(); ++l) {
      out << m + 1 << ',' << l + 1 << ',' << detail::format_double(set(m, l).real()) << ','
          << detail::format_double(set(m, l).imag()) << '\n';
    }
  }
}

inline MultiChannelSet read_multi_channel_set(std::istream& in) {
  const auto records = detail::read_records(in, true);
  std::size_t users = 0;
  for (const auto& r : records) users = std::max(users, r.user);
  if (users == 0) throw FormatError("multi-receiver channel file has no records");
  std::vector<std::vector<const detail::ChannelRecord*>> grouped(users);
  for (const auto& r : records) grouped[r.user - 1].push_back(&r);
  std::vector<ChannelSet> sets;
  for (std::size_t u = 0; u < users; ++u) {
    sets.push_back(detail::assemble(grouped[u], "receiver " + std::to_string(u + 1)));
  }
  try {
    return MultiChannelSet(std::move(sets));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

inline void write_multi_channel_set(std::ostream& out, const MultiChannelSet& mcs) {
  for (std::size_t u = 0; u < mcs.user_count(); ++u) {
    const ChannelSet& set = mcs.user(u);
    out << u + 1 << ",0,0," << detail::format_double(set.direct().real()) << ','
        << detail::format_double(set.direct().imag()) << '\n';
    for (std::size_t m = 0; m < set.m_count(); ++m) {
      for (std::size_t l = 0; l < set.l_count(); ++l) {
        out << u + 1 << ',' << m + 1 << ',' << l + 1 << ',' << detail::format_double(set(m, l).real())
            << ',' << detail::format_double(set(m, l).imag()) << '\n';
      }
    }
  }
}

inline ChannelSet load_channel_set(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return read_channel_set(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline MultiChannelSet load_multi_channel_set(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return read_multi_channel_set(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Reads "key = value" lines; later keys override earlier ones.
inline std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = detail::trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    kv[std::string(detail::trim(text.substr(0, eq)))] = std::string(detail::trim(text.substr(eq + 1)));
  }
  return kv;
}

/// Keys: placement (1-based, comma-separated), objective, mu_angle (radians),
/// candidates_evaluated.
inline void write_solve_result(std::ostream& out, const SolveResult& r) {
  out << "placement = " << r.placement.to_string() << '\n'
      << "objective = " << detail::format_double(r.objective) << '\n'
      << "mu_angle = " << detail::format_double(r.mu_angle) << '\n'
      << "candidates_evaluated = " << r.candidates_evaluated << '\n';
}

inline Placement parse_placement(std::string_view text) {
  std::vector<std::size_t> chosen;
  if (detail::trim(text).empty()) return Placement{};
  for (auto part : detail::split(text, ',')) {
    const auto p = detail::parse_uint(part, "placement index");
    if (p == 0) throw FormatError("placement indices are 1-based");
    chosen.push_back(p - 1);
  }
  return Placement(std::move(chosen));
}

inline SolveResult read_solve_result(std::istream& in) {
  const auto kv = read_key_values(in);
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("solve result: missing key '" + key + "'");
    return it->second;
  };
  SolveResult r;
  r.placement = parse_placement(get("placement"));
  r.objective = detail::parse_double(get("objective"), "objective");
  r.mu_angle = detail::parse_double(get("mu_angle"), "mu_angle");
  r.candidates_evaluated = detail::parse_uint(get("candidates_evaluated"), "candidates_evaluated");
  return r;
}

inline std::vector<std::size_t> parse_size_list(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  for (auto part : detail::split(text, ',')) out.push_back(detail::parse_uint(part, what));
  return out;
}

inline std::vector<MethodId> parse_method_list(std::string_view text) {
  std::vector<MethodId> out;
  for (auto part : detail::split(text, ',')) {
    const auto id = parse_method(part);
    if (!id) throw FormatError("unknown method '" + std::string(part) + "'");
    out.push_back(*id);
  }
  return out;
}

inline bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw FormatError("expected true/false, got '" + std::string(s) + "'");
}

/// Applies "<var>=<v1,v2,...>" to the config's sweep.
inline void apply_sweep_spec(ExperimentConfig& cfg, std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw FormatError("sweep must look like M=10,20,30");
  const auto var = parse_sweep_var(detail::trim(spec.substr(0, eq)));
  if (!var) throw FormatError("unknown sweep variable '" + std::string(spec.substr(0, eq)) + "'");
  cfg.sweep_var = *var;
  cfg.sweep_values = parse_size_list(spec.substr(eq + 1), "sweep value");
}

/// Experiment config schema; see configs/default.cfg for a commented example.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  for (const auto& [key, value] : read_key_values(in)) {
    auto& g = cfg.geometry;
    if (key == "ceiling_x") g.ceiling_x = detail::parse_double(value, key);
    else if (key == "ceiling_y") g.ceiling_y = detail::parse_double(value, key);
    else if (key == "height") g.height = detail::parse_double(value, key);
    else if (key == "grid_mx") g.grid_mx = detail::parse_uint(value, key);
    else if (key == "grid_my") g.grid_my = detail::parse_uint(value, key);
    else if (key == "L") g.l_count = detail::parse_uint(value, key);
    else if (key == "N") g.atoms_per_mts = detail::parse_uint(value, key);
    else if (key == "wavelength") g.wavelength = detail::parse_double(value, key);
    else if (key == "controller") {
      const auto parts = detail::split(value, ',');
      if (parts.size() != 3) throw FormatError("controller must be x,y,z");
      g.controller = Vec3{detail::parse_double(parts[0], key), detail::parse_double(parts[1], key),
                          detail::parse_double(parts[2], key)};
    } else if (key == "users") cfg.users = detail::parse_uint(value, key);
    else if (key == "sweep") apply_sweep_spec(cfg, value);
    else if (key == "methods") cfg.methods = parse_method_list(value);
    else if (key == "trials") cfg.trials = detail::parse_uint(value, key);
    else if (key == "seed") cfg.seed = detail::parse_uint(value, key);
    else if (key == "power_dbm") cfg.power_dbm = detail::parse_double(value, key);
    else if (key == "noise_dbm") cfg.noise_dbm = detail::parse_double(value, key);
    else if (key == "nlos") cfg.nlos = parse_bool(value);
    else if (key == "csi_noise_var") cfg.csi_noise_var = detail::parse_double(value, key);
    else if (key == "brute_force_cap") cfg.brute_force_cap = detail::parse_uint(value, key);
    else if (key == "threads") cfg.threads = detail::parse_uint(value, key);
    else throw FormatError("unknown config key '" + key + "'");
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  auto in = detail::open_in(path);
  try {
    return parse_experiment_config(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline constexpr std::string_view kCsvHeader = "sweep_var,sweep_value,method,trial,boost_db,solve_seconds";

/// One row per trial, ordered by sweep value, method, trial.
inline void write_csv(std::ostream& out, const ExperimentResult& result) {
  out << kCsvHeader << '\n';
  const std::string var(sweep_var_name(result.sweep_var));
  for (const auto& cell : result.cells) {
    for (std::size_t t = 0; t < cell.boost_db.size(); ++t) {
      char secs[32];
      std::snprintf(secs, sizeof secs, "%.9g", cell.solve_seconds[t]);
      out << var << ',' << cell.sweep_value << ',' << method_name(cell.method) << ',' << t << ','
          << detail::format_double(cell.boost_db[t]) << ',' << secs << '\n';
    }
  }
}

inline void emit_csv(const ExperimentResult& result, const std::string& path) {
  auto out = detail::open_out(path);
  write_csv(out, result);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace mtsplace
