#include <cstdio>
#include <exception>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtsplace/mtsplace.hpp"

namespace {

using namespace mtsplace;

// Two MTSs with three candidate positions each, direct link 2e-6.
ChannelSet builtin_toy_channels() {
  constexpr double s = 1e-6;
  return ChannelSet({2.0 * s, 0.0}, {{{0.6 * s, 0.6 * s}, {-1.1 * s, 0.8 * s}, {1.2 * s, -1.4 * s}},
                                     {{-0.5 * s, 0.2 * s}, {0.9 * s, 1.3 * s}, {-1.3 * s, 0.7 * s}}});
}

void print_toy(const ChannelSet& channels) {
  const auto arcs = evaluate_arcs(channels);
  std::printf("%-4s %-22s %-10s %-12s %s\n", "arc", "span/pi", "mu/pi", "placement", "objective");
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto& a = arcs[k];
    char span[32];
    std::snprintf(span, sizeof span, "[%.3f, %.3f)", a.start / std::numbers::pi, a.end / std::numbers::pi);
    std::printf("%-4zu %-22s %-10.3f %-12s %.1e\n", k + 1, span, a.mu_angle / std::numbers::pi,
                ("(" + a.placement.to_string() + ")").c_str(), a.objective);
  }
  const SolveResult best = solve_single(channels);
  std::printf("\noptimal placement (%s), objective %.1e (%.17g)\n", best.placement.to_string().c_str(),
              best.objective, best.objective);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Placement optimizer for movable ceiling-mounted metasurfaces"};
  app.require_subcommand(1);

  std::string channel_path;
  std::uint64_t cap = kDefaultBruteForceCap;
  double power_dbm = 30.0;
  double noise_dbm = -80.0;

  auto* solve = app.add_subcommand("solve", "Optimal placement for one receiver's channel file");
  solve->add_option("channels", channel_path, "Channel file (m,l,re,im)")->required();

  auto* oracle = app.add_subcommand("oracle", "Exhaustive search over all L^M placements");
  oracle->add_option("channels", channel_path, "Channel file (m,l,re,im)")->required();
  oracle->add_option("--cap", cap, "Maximum number of placements to enumerate");

  auto* multi = app.add_subcommand("solve-multi", "Majority-vote placement for several receivers");
  multi->add_option("channels", channel_path, "Multi-receiver channel file (u,m,l,re,im)")->required();
  multi->add_option("--power-dbm", power_dbm, "Transmit power in dBm");
  multi->add_option("--noise-dbm", noise_dbm, "Noise power in dBm");

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::string methods;
  std::string sweep;
  bool nlos = false;
  std::optional<double> csi_noise;

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo sweep written as CSV");
  experiment->add_option("--config", config_path, "Experiment config file")->check(CLI::ExistingFile);
  experiment->add_option("--out", out_path, "Output CSV path")->required();
  experiment->add_option("--seed", seed, "RNG seed");
  experiment->add_option("--trials", trials, "Trials per sweep point");
  experiment->add_option("--methods", methods, "Comma-separated: proposed,cmp,rmp,fix,oracle");
  experiment->add_option("--sweep", sweep, "Sweep spec, e.g. M=10,30,50");
  experiment->add_flag("--nlos", nlos, "Rayleigh direct link with the NLoS pathloss");
  experiment->add_option("--csi-noise", csi_noise, "Variance of the CSI error per channel entry");
  experiment->add_option("--threads", threads, "Worker threads (0 = all cores)");

  std::size_t dump_trial = 0;
  auto* dump = app.add_subcommand("dump-channels", "Write one trial's simulated channels (u,m,l,re,im)");
  dump->add_option("--config", config_path, "Experiment config file")->check(CLI::ExistingFile);
  dump->add_option("--out", out_path, "Output path")->required();
  dump->add_option("--seed", seed, "RNG seed");
  dump->add_option("--trial", dump_trial, "Trial index");
  dump->add_flag("--nlos", nlos, "Rayleigh direct link with the NLoS pathloss");

  auto* toy = app.add_subcommand("toy", "Walk through the two-MTS worked example arc by arc");
  toy->add_option("--channels", channel_path, "Use this channel file instead of the built-in example");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      write_solve_result(std::cout, solve_single(load_channel_set(channel_path)));
    } else if (*oracle) {
      write_solve_result(std::cout, solve_brute_force(load_channel_set(channel_path), cap));
    } else if (*multi) {
      const auto mcs = load_multi_channel_set(channel_path);
      const double p = dbm_to_watts(power_dbm);
      const double n = dbm_to_watts(noise_dbm);
      const Placement placement = solve_multi(mcs);
      std::cout << "placement = " << placement.to_string() << '\n'
                << "worst_snr = " << detail::format_double(worst_snr(mcs, placement, p, n)) << '\n'
                << "worst_boost_db = "
                << detail::format_double(
                       snr_boost_db(worst_snr(mcs, placement, p, n), worst_snr_direct_only(mcs, p, n)))
                << '\n';
    } else if (*experiment || *dump) {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);
      if (seed) cfg.seed = *seed;
      if (nlos) cfg.nlos = true;
      if (*experiment) {
        if (trials) cfg.trials = *trials;
        if (threads) cfg.threads = *threads;
        if (!methods.empty()) cfg.methods = parse_method_list(methods);
        if (!sweep.empty()) apply_sweep_spec(cfg, sweep);
        if (csi_noise) cfg.csi_noise_var = *csi_noise;
        emit_csv(run_experiment(cfg), out_path);
      } else {
        cfg.validate();
        const Geometry geometry = build_geometry(cfg.geometry);
        auto out = detail::open_out(out_path);
        write_multi_channel_set(out, sample_trial_channels(cfg, geometry, dump_trial));
      }
    } else if (*toy) {
      print_toy(channel_path.empty() ? builtin_toy_channels() : load_channel_set(channel_path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
