// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "support.hpp"

using namespace mtsplace;
using namespace mtsplace::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Tolerances and sizes.
constexpr double kObjectiveRel = 1e-12;
constexpr double kPrintedAbs = 0.05e-6;
constexpr std::size_t kOracleInstances = 600;
constexpr double kExponentLo = 1.6;
constexpr double kExponentHi = 2.6;
constexpr double kSpeedup = 100.0;
constexpr std::size_t kReductionInstances = 200;
constexpr std::size_t kTrials = 200;
constexpr double kGapAtM50 = 0.5;
constexpr double kFixCeiling = 1.0;
constexpr double kNlosGap = 2.0;
constexpr double kCsiVar = 1e-10;

template <typename Fn>
double seconds_per_call(Fn&& fn, std::size_t reps) {
  std::vector<double> samples;
  for (int round = 0; round < 5; ++round) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(reps));
  }
  return *std::min_element(samples.begin(), samples.end());
}

Outcome toy_golden() {
  const ChannelSet toy = toy_channels();
  const SolveResult r = solve_single(toy);
  const double exact = std::abs(ComplexGain(4.1, -0.1)) * 1e-6;
  Outcome out{true, ""};
  if (r.placement != Placement::from_one_based({3, 2}) || rel_diff(r.objective, exact) > kObjectiveRel) {
    out.pass = false;
    out.detail += "solve_single gave (" + r.placement.to_string() + ") " + fmt("%.6e; ", r.objective);
  }
  // Placements and objectives as printed in the worked example's result table.
  const std::vector<std::pair<Placement, double>> printed{
      {Placement::from_one_based({3, 1}), 2.9e-6}, {Placement::from_one_based({3, 3}), 2.0e-6},
      {Placement::from_one_based({2, 3}), 1.6e-6}, {Placement::from_one_based({2, 2}), 2.8e-6},
      {Placement::from_one_based({1, 2}), 3.9e-6}, {Placement::from_one_based({3, 2}), 4.1e-6}};
  int bad = 0;
  for (const auto& [x, value] : printed) {
    const double f = evaluate_objective(toy, x);
    if (std::abs(f - value) > kPrintedAbs) {
      out.pass = false;
      ++bad;
      out.detail += fmt("(%s) computed %.4fe-6 vs printed %.1fe-6; ", x.to_string().c_str(), f * 1e6, value * 1e6);
    }
  }
  if (out.pass) out.detail = "placement (3,2), objective " + fmt("%.12e", r.objective) + ", grid within 0.05e-6";
  else out.detail += fmt("%d of %zu printed cells outside 0.05e-6", bad, printed.size());
  return out;
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  const PropertyReport rep = check_oracle_equivalence(kOracleInstances, 2024, &worst);
  return {rep.ok, fmt("%zu simulator instances, worst relative gap %.3g", kOracleInstances, worst) +
                      (rep.ok ? "" : "; " + rep.detail)};
}

Outcome candidates_and_complexity() {
  Outcome out{true, ""};
  SeededRng rng(77, 0);
  std::size_t fuzzed = 0;
  for (std::size_t k = 0; k < 2000; ++k) {
    const ChannelSet ch = gaussian_instance(1 + k % 12, 1 + k % 9, rng);
    const std::size_t bound = ch.m_count() * ch.l_count() * (ch.l_count() - 1);
    if (transition_candidates(ch).angles.size() > bound) {
      out.pass = false;
      out.detail = fmt("instance %zu exceeds M*L*(L-1); ", k);
    }
    ++fuzzed;
  }

  constexpr std::size_t kM = 30;
  const std::vector<std::size_t> ls{4, 8, 16, 32};
  std::vector<double> xs, ys;
  std::string times;
  for (std::size_t l : ls) {
    std::vector<ChannelSet> instances;
    SeededRng irng(78, l);
    for (int i = 0; i < 8; ++i) instances.push_back(gaussian_instance(kM, l, irng));
    double sink = 0.0;
    const std::size_t reps = std::max<std::size_t>(1, 4096 / (l * l));
    const double t = seconds_per_call(
        [&] {
          for (const auto& ch : instances) sink += solve_single(ch).objective;
        },
        reps);
    if (sink < 0.0) std::puts("");
    xs.push_back(std::log(static_cast<double>(l)));
    ys.push_back(std::log(t));
    times += fmt(" L=%zu:%.3gs", l, t / instances.size());
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  if (slope < kExponentLo || slope > kExponentHi) out.pass = false;
  out.detail += fmt("%zu fuzzed instances within bound; time-vs-L exponent %.2f at M=%zu (want [%.1f, %.1f]);",
                    fuzzed, slope, kM, kExponentLo, kExponentHi) +
                times;
  return out;
}

Outcome speed_vs_exhaustive() {
  const ChannelSet ch = simulated_instance(10, 6, 99, 0);
  const SolveResult fast = solve_single(ch);
  const auto t0 = std::chrono::steady_clock::now();
  const SolveResult slow = solve_brute_force(ch, 100'000'000);
  const double brute = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double sink = 0.0;
  const double sweep = seconds_per_call([&] { sink += solve_single(ch).objective; }, 200);
  const double ratio = brute / sweep;
  const bool same = rel_diff(fast.objective, slow.objective) <= kObjectiveRel;
  return {ratio >= kSpeedup && same && sink > 0.0,
          fmt("M=10 L=6: sweep %.3gs, exhaustive %.3gs, ratio %.0fx (want >= %.0fx), objectives %s", sweep, brute,
              ratio, kSpeedup, same ? "equal" : "differ")};
}

Outcome multi_reduction() {
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < kReductionInstances; ++k) {
    const ChannelSet ch = simulated_instance(1 + k % 8, 1 + k % 6, 5, k);
    if (solve_multi(MultiChannelSet({ch})) != solve_single(ch).placement) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu instances, %zu mismatches", kReductionInstances, mismatches)};
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.trials = kTrials;
  cfg.methods = {MethodId::kProposedSingle, MethodId::kCmp, MethodId::kRmp, MethodId::kFix};
  return cfg;
}

const ExperimentResult& los_sweep() {
  static const ExperimentResult r = [] {
    ExperimentConfig cfg = desk_config();
    cfg.sweep_values = {10, 30, 50};
    return run_experiment(cfg);
  }();
  return r;
}

Outcome method_ordering() {
  const auto& r = los_sweep();
  Outcome out{true, ""};
  for (std::size_t m : {10u, 30u, 50u}) {
    const double p = r.cell(m, MethodId::kProposedSingle).mean_boost_db();
    const double c = r.cell(m, MethodId::kCmp).mean_boost_db();
    const double q = r.cell(m, MethodId::kRmp).mean_boost_db();
    const double f = r.cell(m, MethodId::kFix).mean_boost_db();
    if (!(p > std::max(c, q) && std::max(c, q) > f)) out.pass = false;
    out.detail += fmt("M=%zu proposed %.2f cmp %.2f rmp %.2f fix %.2f; ", m, p, c, q, f);
  }
  const double gap = r.cell(50, MethodId::kProposedSingle).mean_boost_db() - r.cell(50, MethodId::kCmp).mean_boost_db();
  if (gap < kGapAtM50) out.pass = false;
  out.detail += fmt("gap over cmp at M=50 %.2f dB (want >= %.1f)", gap, kGapAtM50);
  return out;
}

Outcome fix_weakness() {
  const auto& r = los_sweep();
  Outcome out{true, "fix mean boost"};
  for (std::size_t m : {10u, 30u, 50u}) {
    const double f = r.cell(m, MethodId::kFix).mean_boost_db();
    if (!(f < kFixCeiling)) out.pass = false;
    out.detail += fmt(" M=%zu %.2f dB;", m, f);
  }
  out.detail += fmt(" want < %.1f dB everywhere", kFixCeiling);
  return out;
}

Outcome nlos_behavior() {
  ExperimentConfig cfg = desk_config();
  cfg.nlos = true;
  const ExperimentResult nlos = run_experiment(cfg);
  const auto& los = los_sweep();
  const std::size_t m = sweep_base_value(cfg);
  Outcome out{true, ""};
  for (MethodId id : cfg.methods) {
    const double a = nlos.cell(m, id).median_boost_db();
    const double b = los.cell(m, id).median_boost_db();
    if (!(a > b)) out.pass = false;
    out.detail += fmt("%s median %.2f (LoS %.2f); ", std::string(method_name(id)).c_str(), a, b);
  }
  const double p = nlos.cell(m, MethodId::kProposedSingle).median_boost_db();
  const double gc = p - nlos.cell(m, MethodId::kCmp).median_boost_db();
  const double gr = p - nlos.cell(m, MethodId::kRmp).median_boost_db();
  if (gc < kNlosGap || gr < kNlosGap) out.pass = false;
  out.detail += fmt("M=%zu median gap over cmp %.2f dB, over rmp %.2f dB (want >= %.1f)", m, gc, gr, kNlosGap);
  return out;
}

Outcome csi_robustness() {
  ExperimentConfig cfg = desk_config();
  cfg.csi_noise_var = kCsiVar;
  const ExperimentResult noisy = run_experiment(cfg);
  const std::size_t m = sweep_base_value(cfg);
  const double p = noisy.cell(m, MethodId::kProposedSingle).median_boost_db();
  const double perfect = los_sweep().cell(m, MethodId::kProposedSingle).median_boost_db();
  Outcome out{p < perfect, fmt("M=%zu proposed median %.2f (perfect CSI %.2f)", m, p, perfect)};
  for (MethodId id : {MethodId::kCmp, MethodId::kRmp, MethodId::kFix}) {
    const double o = noisy.cell(m, id).median_boost_db();
    if (!(p > o)) out.pass = false;
    out.detail += fmt(", %s %.2f", std::string(method_name(id)).c_str(), o);
  }
  return out;
}

Outcome property_suites() {
  const std::vector<std::pair<std::string, PropertyReport>> reports{
      {"bound", check_bound_tightness(500, 1)},
      {"arcs", check_arc_stability(300, 2)},
      {"covariance", check_rotation_scale_covariance(300, 3)},
      {"votes", check_vote_conservation(300, 4)},
      {"rng", check_rng_reproducibility(5)}};
  Outcome out{true, ""};
  for (const auto& [name, rep] : reports) {
    if (!rep.ok) out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += name + (rep.ok ? " ok" : " FAILED (" + rep.detail + ")");
  }
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"toy-golden", toy_golden},
      {"oracle-equivalence", oracle_equivalence},
      {"candidate-count-and-complexity", candidates_and_complexity},
      {"speed-vs-exhaustive", speed_vs_exhaustive},
      {"multi-receiver-reduction", multi_reduction},
      {"method-ordering", method_ordering},
      {"fix-placement-weakness", fix_weakness},
      {"nlos-behavior", nlos_behavior},
      {"imperfect-csi-robustness", csi_robustness},
      {"property-suites", property_suites},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
