// Command-line front end: one subcommand per simulation module.
// CSV goes to stdout (or --out), human-readable summaries to stderr.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ebsim/bench.hpp"
#include "ebsim/interferometer.hpp"
#include "ebsim/io.hpp"
#include "ebsim/polarizer.hpp"
#include "ebsim/sim_server.hpp"
#include "ebsim/stationary.hpp"
#include "ebsim/table1.hpp"

namespace {

using namespace ebsim;

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

// Holds either the --out file or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::array<double, 4> parse_phases(const std::vector<double>& deg) {
  if (deg.size() != 4) throw CLI::ValidationError("--phi", "expected four comma-separated angles");
  return {deg_to_rad(deg[0]), deg_to_rad(deg[1]), deg_to_rad(deg[2]), deg_to_rad(deg[3])};
}

struct Common {
  std::uint64_t seed{0};
  std::string out;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Random seed (default: $EBSIM_SEED or 0)");
  sub->add_option("--out", common.out, "Write CSV here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-by-event simulation of single-particle interference"};
  app.require_subcommand(1);

  std::uint64_t default_seed = 0;
  if (const char* env = std::getenv("EBSIM_SEED")) {
    try {
      std::size_t used = 0;
      default_seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "error: EBSIM_SEED must be a non-negative integer\n";
      return kUsageError;
    }
  }
  Common common{default_seed, {}};

  // polarizer
  auto* pol = app.add_subcommand("polarizer", "Feed a fixed input angle to one processor and count the channels");
  PolarizerRunConfig pol_cfg;
  std::string pol_kind = "dlm";
  double pol_theta_deg = 0.0;
  pol->add_option("--kind", pol_kind, "bernoulli | dlm | modified")->check(CLI::IsMember({"bernoulli", "dlm", "modified"}));
  pol->add_option("--theta-deg", pol_theta_deg, "Input angle in degrees")->required();
  pol->add_option("--alpha", pol_cfg.alpha, "DLM learning parameter")->capture_default_str();
  pol->add_option("--n", pol_cfg.n, "Counted events")->capture_default_str();
  pol->add_option("--warmup", pol_cfg.warmup, "Discarded events before counting")->capture_default_str();
  add_common(pol, common);

  // stationary
  auto* sta = app.add_subcommand("stationary", "Extract the stationary DLM output sequence and its orbit");
  double sta_theta_deg = 0.0;
  double sta_alpha = 0.99;
  std::uint64_t sta_warmup = 100000;
  std::uint64_t sta_max_period = 4096;
  sta->add_option("--theta-deg", sta_theta_deg, "Input angle in degrees")->required();
  sta->add_option("--alpha", sta_alpha)->capture_default_str();
  sta->add_option("--warmup", sta_warmup)->capture_default_str();
  sta->add_option("--max-period", sta_max_period)->capture_default_str();
  add_common(sta, common);

  // table1
  auto* tab = app.add_subcommand("table1", "Check the closed-form orbit formulas of all periodic sequences up to q=8");
  double tab_alpha = 0.99;
  tab->add_option("--alpha", tab_alpha)->capture_default_str();
  add_common(tab, common);

  // wigner
  auto* wig = app.add_subcommand("wigner", "Generalized Wigner lattice ground state versus brute-force minimum variance");
  std::uint64_t wig_p = 1;
  std::uint64_t wig_q = 2;
  double wig_alpha = 0.99;
  wig->add_option("--p", wig_p, "Particles")->required();
  wig->add_option("--q", wig_q, "Sites")->required();
  wig->add_option("--alpha", wig_alpha, "Used for the variance comparison")->capture_default_str();
  add_common(wig, common);

  // mzi
  auto* mzi = app.add_subcommand("mzi", "Run the two chained Mach-Zehnder interferometers");
  std::vector<double> mzi_phi{0, 0, 0, 0};
  std::uint64_t mzi_n = 100000;
  std::string mzi_mode = "deterministic";
  std::uint64_t mzi_every = 0;
  std::uint64_t mzi_transient = 0;
  BeamSplitterParams mzi_params;
  mzi->add_option("--phi", mzi_phi, "Four phases in degrees")->delimiter(',')->expected(4);
  mzi->add_option("--n", mzi_n, "Messengers")->capture_default_str();
  mzi->add_option("--mode", mzi_mode)->check(CLI::IsMember({"deterministic", "probabilistic"}))->capture_default_str();
  mzi->add_option("--sample-every", mzi_every, "CSV row interval (default: one row at the end)");
  mzi->add_option("--transient", mzi_transient, "Events run before the counters are cleared")->capture_default_str();
  mzi->add_option("--gamma", mzi_params.gamma, "Beam splitter intensity memory")->capture_default_str();
  mzi->add_option("--alpha", mzi_params.alpha, "Beam splitter output DLM parameter")->capture_default_str();
  add_common(mzi, common);

  // bench
  auto* ben = app.add_subcommand("bench", "Estimation error e(N) over an angle grid");
  BenchConfig ben_cfg;
  std::string ben_kind = "dlm";
  std::string ben_grid = "rational";
  std::string ben_detail;
  ben->add_option("--kind", ben_kind)->check(CLI::IsMember({"bernoulli", "dlm", "modified"}))->capture_default_str();
  ben->add_option("--grid", ben_grid)->check(CLI::IsMember({"rational", "uniform"}))->capture_default_str();
  ben->add_option("--alpha", ben_cfg.alpha)->capture_default_str();
  ben->add_option("--m", ben_cfg.grid_resolution, "Grid resolution M")->capture_default_str();
  ben->add_option("--n-list", ben_cfg.n_list, "Ascending event counts")->delimiter(',');
  ben->add_option("--warmup", ben_cfg.warmup)->capture_default_str();
  ben->add_option("--threads", ben_cfg.threads, "0 = all cores")->capture_default_str();
  ben->add_option("--detail", ben_detail, "Also write the per-m error table here");
  add_common(ben, common);

  // serve
  auto* srv = app.add_subcommand("serve", "Live interferometer over line-delimited JSON on TCP");
  ServerConfig srv_cfg;
  int srv_port = 8765;
  std::vector<double> srv_phi{0, 0, 0, 0};
  std::string srv_mode = "deterministic";
  bool srv_public = false;
  srv->add_option("--port", srv_port, "0 picks a free port")->check(CLI::Range(0, 65535))->capture_default_str();
  srv->add_option("--rate", srv_cfg.events_per_second, "Events per second")->capture_default_str();
  srv->add_option("--phi", srv_phi, "Initial phases in degrees")->delimiter(',')->expected(4);
  srv->add_option("--mode", srv_mode)->check(CLI::IsMember({"deterministic", "probabilistic"}))->capture_default_str();
  srv->add_flag("--paused", srv_cfg.start_paused, "Start with the event clock stopped");
  srv->add_flag("--public", srv_public, "Listen on all interfaces instead of loopback");
  add_common(srv, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (pol->parsed()) {
      pol_cfg.kind = processor_kind_from_string(pol_kind);
      pol_cfg.theta = deg_to_rad(pol_theta_deg);
      pol_cfg.seed = common.seed;
      const auto run = run_polarizer(pol_cfg);
      Output out(common.out);
      const double ratio = static_cast<double>(run.count_s) / static_cast<double>(pol_cfg.n);
      out.stream() << "kind,theta_deg,alpha,n,count_c,count_s,ratio_s,sin2_theta,theta_estimate_deg\n"
                   << pol_kind << ',' << fmt_real(pol_theta_deg) << ',' << fmt_real(pol_cfg.alpha) << ','
                   << pol_cfg.n << ',' << run.count_c << ',' << run.count_s << ',' << fmt_real(ratio) << ','
                   << fmt_real(std::pow(std::sin(pol_cfg.theta), 2)) << ','
                   << fmt_real(rad_to_deg(run.theta_estimate)) << '\n';
      std::cerr << "C=" << run.count_c << " S=" << run.count_s << "  estimate " << rad_to_deg(run.theta_estimate)
                << " deg\n";
    } else if (sta->parsed()) {
      const auto seq = extract_stationary_sequence(deg_to_rad(sta_theta_deg), sta_alpha, sta_warmup, sta_max_period,
                                                   common.seed);
      if (!seq) {
        throw std::domain_error("no period up to " + std::to_string(sta_max_period) + " after " +
                                std::to_string(sta_warmup) + " warmup events");
      }
      const auto orbit = orbit_fixed_points(*seq, sta_alpha);
      Output out(common.out);
      out.stream() << "theta_deg,alpha,sequence,p,q,density,sin2_theta,orbit_mean,orbit_variance,xhat_sq_0\n"
                   << fmt_real(sta_theta_deg) << ',' << fmt_real(sta_alpha) << ',' << seq->to_string() << ','
                   << seq->ones() << ',' << seq->size() << ',' << fmt_real(seq->density()) << ','
                   << fmt_real(std::pow(std::sin(deg_to_rad(sta_theta_deg)), 2)) << ',' << fmt_real(orbit.mean)
                   << ',' << fmt_real(orbit.variance) << ',' << fmt_real(orbit.fixed_points.front()) << '\n';
      std::cerr << "stationary sequence " << seq->to_string() << " (p/q = " << seq->ones() << '/' << seq->size()
                << ")\n";
    } else if (tab->parsed()) {
      const auto checks = verify_table1(tab_alpha);
      Output out(common.out);
      write_table1_csv(out.stream(), checks);
      int bad = 0;
      for (const auto& c : checks) {
        const bool ok = std::abs(c.xhat_formula - c.xhat_numeric) <= 1e-12 &&
                        std::abs(c.variance_formula - c.variance_numeric) <= 1e-12;
        bad += ok ? 0 : 1;
      }
      std::cerr << checks.size() - static_cast<std::size_t>(bad) << '/' << checks.size()
                << " rows match their formulas within 1e-12\n";
      if (bad > 0) return kDomainError;
    } else if (wig->parsed()) {
      const auto ground = wigner_ground_state(wig_p, wig_q);
      const auto brute = brute_force_min_variance(ground.p, ground.q, wig_alpha);
      const bool agree = same_necklace(ground.occupation, brute);
      Output out(common.out);
      out.stream() << "p,q,ground_state,brute_force_min_variance,agree,energy\n"
                   << ground.p << ',' << ground.q << ',' << ground.occupation.to_string() << ','
                   << brute.to_string() << ',' << (agree ? "true" : "false") << ','
                   << fmt_real(lattice_energy(ground.occupation, wig_alpha)) << '\n';
      std::cerr << ground.occupation.to_string() << (agree ? "  brute force agrees\n" : "  brute force DISAGREES\n");
    } else if (mzi->parsed()) {
      if (mzi_n == 0) throw std::domain_error("--n must be at least 1");
      Interferometer sim(build_two_mzi(parse_phases(mzi_phi)), output_mode_from_string(mzi_mode), common.seed,
                         mzi_params);
      sim.run(mzi_transient);
      sim.reset_counters();
      Output out(common.out);
      write_network_csv(out.stream(), sim, mzi_n, mzi_every == 0 ? mzi_n : mzi_every);
      const auto ref = sim.quantum_reference();
      std::cerr << "j   N_j/N     |b_j|^2\n";
      for (std::size_t j = 0; j < 6; ++j) {
        std::cerr << j << "   " << sim.counters().ratio(j) << "   " << ref.probs[j] << '\n';
      }
    } else if (ben->parsed()) {
      ben_cfg.kind = processor_kind_from_string(ben_kind);
      ben_cfg.grid = grid_kind_from_string(ben_grid);
      ben_cfg.seed = common.seed;
      const auto detail = benchmark_detail(ben_cfg);
      const auto result = summarize(detail, ben_cfg.grid_resolution);
      Output out(common.out);
      write_bench_csv(out.stream(), ben_cfg, result);
      if (!ben_detail.empty()) {
        Output det(ben_detail);
        write_bench_detail_csv(det.stream(), ben_cfg, detail);
      }
      for (const auto& row : result.rows) std::cerr << "N=" << row.n << "  e(N)=" << row.error << '\n';
    } else if (srv->parsed()) {
      srv_cfg.seed = common.seed;
      srv_cfg.mode = output_mode_from_string(srv_mode);
      for (std::size_t j = 0; j < 4; ++j) srv_cfg.phases_deg[j] = srv_phi.size() == 4 ? srv_phi[j] : 0.0;
      if (srv_phi.size() != 4) throw CLI::ValidationError("--phi", "expected four comma-separated angles");
      Server server(srv_cfg);
      const auto port = server.start(static_cast<std::uint16_t>(srv_port), srv_public);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "port " << port << std::endl;
      std::cerr << "listening on " << (srv_public ? "0.0.0.0" : "127.0.0.1") << ':' << port << '\n';
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return 0;
}
