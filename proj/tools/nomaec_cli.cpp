// Command-line front end: parameter sweeps, figure presets, validation
// reports and queue simulations.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nomaec/delay.hpp"
#include "nomaec/error.hpp"
#include "nomaec/queuesim.hpp"
#include "nomaec/report.hpp"
#include "nomaec/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct ControlOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> mc_samples;
  std::optional<unsigned> threads;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "random seed");
    app->add_option("--mc-samples", mc_samples, "Monte-Carlo sample count");
    app->add_option("--threads", threads, "worker threads (0: all cores)");
  }
  void apply(nomaec::EvalControls& ctl) const {
    if (seed) ctl.seed = *seed;
    if (mc_samples) ctl.mc_samples = *mc_samples;
    if (threads) ctl.threads = *threads;
  }
};

void report_unconverged(const std::vector<nomaec::ResultRow>& rows) {
  std::size_t bad = 0;
  for (const auto& r : rows) bad += r.converged ? 0 : 1;
  if (bad > 0) std::cerr << "warning: " << bad << " of " << rows.size() << " rows did not converge\n";
}

int cmd_sweep(const std::string& config, const ControlOverrides& ov, const std::string& out_dir) {
  auto specs = nomaec::parse_sweep_config_file(config);
  for (auto& spec : specs) {
    ov.apply(spec.controls);
    if (spec.output_path.empty()) spec.output_path = spec.scenario_id + ".csv";
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      spec.output_path = (std::filesystem::path(out_dir) / spec.output_path).string();
    }
    const auto rows = nomaec::run_sweep(spec);
    report_unconverged(rows);
    std::cout << spec.scenario_id << ": " << rows.size() << " rows -> " << spec.output_path << "\n";
  }
  return kExitOk;
}

int cmd_figure(const std::string& name, const ControlOverrides& ov, std::string out, bool plot) {
  auto preset = nomaec::figure_preset(name);
  if (out.empty()) out = preset.name + ".csv";
  std::vector<nomaec::ResultRow> rows;
  for (auto& curve : preset.curves) {
    ov.apply(curve.controls);
    const auto part = nomaec::run_sweep(curve);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  nomaec::write_csv_file(out, rows);
  report_unconverged(rows);
  std::cout << preset.name << ": " << rows.size() << " rows -> " << out << "\n";
  if (plot) {
    const std::string gp = out + ".gp";
    std::ofstream f(gp);
    if (!f) throw std::runtime_error("cannot write '" + gp + "'");
    f << nomaec::plot_script(preset, std::filesystem::path(out).filename().string());
    std::cout << "plot script -> " << gp << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective capacity and delay-violation toolkit for two-user downlink NOMA with short packets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nomaec 1.0.0");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the sweeps defined in a config file");
  std::string config_path, out_dir;
  ControlOverrides sweep_ov;
  sweep->add_option("config", config_path, "config file")->required();
  sweep->add_option("--out-dir", out_dir, "directory for the CSV files");
  sweep_ov.add_to(sweep);

  // figure
  auto* figure = app.add_subcommand("figure", "reproduce a figure preset as CSV");
  std::string figure_name, figure_out;
  bool plot = false;
  ControlOverrides figure_ov;
  figure->add_option("name", figure_name, "fig3 | fig4 | fig5 | fig6")->required();
  figure->add_option("--out", figure_out, "CSV path (default <name>.csv)");
  figure->add_flag("--plot-script", plot, "also write a gnuplot script next to the CSV");
  figure_ov.add_to(figure);

  // validate
  auto* validate = app.add_subcommand("validate", "cross-check closed form, quadrature and Monte-Carlo");
  std::vector<double> rho_dbs;
  nomaec::SystemConfig vcfg;
  nomaec::EvalControls vctl;
  double vtheta = 0.01;
  bool as_json = false;
  ControlOverrides validate_ov;
  validate->add_option("--rho-db", rho_dbs, "transmit SNR in dB (repeatable; default 20)");
  validate->add_option("--theta", vtheta, "delay exponent per bit for both users");
  validate->add_option("--n", vcfg.n, "blocklength");
  validate->add_option("--eps", vcfg.eps, "decoding error probability");
  validate->add_option("--series-max-terms", vctl.series_max_terms, "weak-user series term budget");
  validate->add_flag("--json", as_json, "machine-readable output");
  validate_ov.add_to(validate);

  // queue-sim
  auto* qsim = app.add_subcommand("queue-sim", "simulate the finite-blocklength queue");
  nomaec::SimSpec sim;
  sim.cfg.n = 400;
  sim.cfg.eps = 1e-6;
  double qtheta = 0.01, mu_frac = 0.95, q_rho_db = 20.0;
  std::string qrole = "strong";
  int replications = 1;
  qsim->add_option("--theta", qtheta, "delay exponent used to set the arrival rate");
  qsim->add_option("--mu-frac", mu_frac, "arrival rate as a fraction of EC(theta)");
  qsim->add_option("--blocks", sim.num_blocks, "blocks per replication");
  qsim->add_option("--warmup", sim.warmup_blocks, "warm-up blocks discarded");
  qsim->add_option("--role", qrole, "weak | strong");
  qsim->add_option("--rho-db", q_rho_db, "transmit SNR in dB");
  qsim->add_option("--n", sim.cfg.n, "blocklength");
  qsim->add_option("--eps", sim.cfg.eps, "decoding error probability");
  qsim->add_option("--d-max", sim.d_max, "delay bound in channel uses");
  qsim->add_option("--seed", sim.seed, "random seed");
  qsim->add_option("--replications", replications, "independent replications (seeds seed..seed+R-1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(config_path, sweep_ov, out_dir);
    if (*figure) return cmd_figure(figure_name, figure_ov, figure_out, plot);

    if (*validate) {
      validate_ov.apply(vctl);
      vcfg.theta_t = vcfg.theta_u = vtheta;
      if (rho_dbs.empty()) rho_dbs.push_back(20.0);
      bool ok = true;
      std::string json_out = "[";
      for (std::size_t i = 0; i < rho_dbs.size(); ++i) {
        nomaec::SystemConfig cfg = vcfg;
        cfg.rho = nomaec::db_to_linear(rho_dbs[i]);
        const auto rep = nomaec::validate_report(cfg, vctl);
        ok = ok && rep.all_pass();
        if (as_json) {
          json_out += (i ? ",\n" : "\n") + rep.to_json();
        } else {
          std::cout << rep.to_text() << (i + 1 < rho_dbs.size() ? "\n" : "");
        }
      }
      if (as_json) std::cout << json_out << "\n]\n";
      return ok ? kExitOk : kExitValidation;
    }

    if (*qsim) {
      sim.role = nomaec::role_from_string(qrole);
      sim.cfg.rho = nomaec::db_to_linear(q_rho_db);
      sim.cfg.theta_t = sim.cfg.theta_u = qtheta;
      if (replications < 1) throw nomaec::ConfigError("--replications must be >= 1");
      const auto ec = nomaec::ec_quadrature(sim.cfg, sim.role, {});
      if (ec.value <= 0.0) throw nomaec::ConfigError("EC(theta) is not positive; no admissible arrival rate");
      sim.arrival_rate = mu_frac * ec.value;
      std::vector<std::uint64_t> seeds(static_cast<std::size_t>(replications));
      std::iota(seeds.begin(), seeds.end(), sim.seed);
      const auto st = nomaec::run_queue_replications(sim, seeds);
      const double analytic =
          nomaec::delay_violation_prob(qtheta, {sim.d_max, 1.0, sim.arrival_rate});
      const double analytic_measured =
          st.nonempty_freq > 0.0
              ? nomaec::delay_violation_prob(qtheta, {sim.d_max, st.nonempty_freq, sim.arrival_rate})
              : 0.0;
      std::printf("EC(theta)               %.6f bit/cu (theta = %g)\n", ec.value, qtheta);
      std::printf("arrival rate            %.6f bit/cu\n", sim.arrival_rate);
      std::printf("blocks simulated        %llu\n", static_cast<unsigned long long>(st.tail.samples));
      std::printf("decoding failures       %llu\n", static_cast<unsigned long long>(st.decoding_failures));
      std::printf("Pr{Q > 0}               %.6g\n", st.nonempty_freq);
      std::printf("mean queue              %.6g bit\n", st.mean_queue);
      if (st.fit) {
        std::printf("fitted tail exponent    %.6g +- %.2g per bit (%d points)\n", st.fit->slope, st.fit->std_error,
                    st.fit->points);
      } else {
        std::printf("fitted tail exponent    unavailable (%s)\n", st.fit_note.c_str());
      }
      std::printf("delay violations        %llu / %llu = %.6g\n",
                  static_cast<unsigned long long>(st.delay_violations),
                  static_cast<unsigned long long>(st.delay_samples), st.delay_violation_freq);
      std::printf("analytic, Pr{Q>0} = 1   %.6g\n", analytic);
      std::printf("analytic, measured      %.6g\n", analytic_measured);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
