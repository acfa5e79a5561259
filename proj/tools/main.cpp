// aeroplan: serve a live session, run headless trials, analyse results,
// replay logs.

#include <pthread.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aeroplan/environment.hpp"
#include "aeroplan/error.hpp"
#include "aeroplan/net/ws_server.hpp"
#include "aeroplan/session.hpp"
#include "aeroplan/stats.hpp"
#include "aeroplan/trial.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

aeroplan::LabEnvironment load_env(const std::string& file) {
  return file.empty() ? aeroplan::default_environment()
                      : aeroplan::load_environment(file);
}

int cmd_serve(const std::string& env_file, unsigned short port, double speed,
              const std::optional<std::string>& token, const std::string& log_dir,
              const std::string& record_file) {
  aeroplan::SessionConfig config;
  config.token = token;
  if (!log_dir.empty()) config.log_dir = log_dir;
  aeroplan::Session session(load_env(env_file), config);
  aeroplan::net::WsServer server(session, {"127.0.0.1", port, speed});

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });

  std::cout << "listening on ws://127.0.0.1:" << server.port() << " (speed " << speed
            << "x)" << std::endl;
  server.run();
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();

  if (!record_file.empty()) aeroplan::save_recording(record_file, session.recording());
  std::cout << "session ended after " << session.world().time() << " s, "
            << session.finished_trials().size() << " trial(s) finished" << std::endl;
  return kExitOk;
}

int cmd_trial(const std::string& env_file, const std::string& agent_name,
              std::uint64_t seed, const std::string& out_dir, int trial_index,
              const std::string& subject) {
  try {
    aeroplan::make_agent(agent_name);
  } catch (const aeroplan::Error& e) {
    std::cerr << "error: " << e.detail() << " (known: ";
    const auto names = aeroplan::agent_names();
    for (std::size_t i = 0; i < names.size(); ++i) std::cerr << (i ? ", " : "") << names[i];
    std::cerr << ")\n";
    return kExitUsage;
  }
  const auto env = load_env(env_file);
  if (env.trials.empty()) {
    std::cerr << "error: environment defines no trials\n";
    return kExitFailure;
  }
  if (trial_index > static_cast<int>(env.trials.size())) {
    std::cerr << "error: environment has " << env.trials.size() << " trials\n";
    return kExitUsage;
  }

  std::vector<aeroplan::TrialResult> results;
  for (std::size_t i = 0; i < env.trials.size(); ++i) {
    if (trial_index > 0 && static_cast<int>(i) + 1 != trial_index) continue;
    auto agent = aeroplan::make_agent(agent_name);
    results.push_back(aeroplan::run_trial(env, env.trials[i], *agent, seed + i));
    const auto& r = results.back();
    std::cout << "trial " << i + 1 << ": " << aeroplan::to_string(r.outcome) << " ("
              << r.reason << "), " << r.duration << " s, planning " << r.planning_time
              << " s, crashes " << r.crashes << '\n';
  }
  aeroplan::write_trial_outputs(out_dir, results, subject.empty() ? agent_name : subject);
  return kExitOk;
}

int cmd_stats(const std::string& in_file, const std::string& measure,
              const std::string& survey_file, const std::string& csv_out,
              const std::string& plot_out) {
  std::optional<double> alpha;
  aeroplan::MeasureTable table;
  if (measure == "usability") {
    if (survey_file.empty()) {
      std::cerr << "error: --measure usability needs --survey\n";
      return kExitUsage;
    }
    std::ifstream survey(survey_file);
    if (!survey) throw aeroplan::Error(aeroplan::ErrorCode::kConfigError,
                                       "cannot read " + survey_file);
    const auto rows = aeroplan::read_survey(survey);
    table = aeroplan::usability_table(rows);
    alpha = aeroplan::cronbach_alpha(aeroplan::usability_item_matrix(rows));
  } else {
    if (in_file.empty()) {
      std::cerr << "error: --in is required for " << measure << "\n";
      return kExitUsage;
    }
    std::ifstream in(in_file);
    if (!in) throw aeroplan::Error(aeroplan::ErrorCode::kConfigError,
                                   "cannot read " + in_file);
    table = aeroplan::read_measure_table(in, measure);
    if (!survey_file.empty()) {
      std::ifstream survey(survey_file);
      if (!survey) throw aeroplan::Error(aeroplan::ErrorCode::kConfigError,
                                         "cannot read " + survey_file);
      alpha = aeroplan::cronbach_alpha(
          aeroplan::usability_item_matrix(aeroplan::read_survey(survey)));
    }
  }
  const auto report = aeroplan::analyze(measure, std::move(table), alpha);
  std::cout << aeroplan::render_text(report);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    aeroplan::write_report_csv(out, report);
  }
  if (!plot_out.empty()) {
    std::ofstream out(plot_out);
    aeroplan::write_plot_data(out, report);
  }
  return kExitOk;
}

int cmd_replay(const std::string& log_file, const std::string& out_file) {
  const auto original = aeroplan::load_log(log_file);
  const auto replayed = aeroplan::replay_trial(original);
  if (!out_file.empty()) aeroplan::save_log(out_file, replayed.log);

  const auto& a = original.events();
  const auto& b = replayed.log.events();
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (aeroplan::event_to_line(a[i]) != aeroplan::event_to_line(b[i])) {
      std::cout << "diverged at event " << i + 1 << "\n  logged:   "
                << aeroplan::event_to_line(a[i]) << "\n  replayed: "
                << aeroplan::event_to_line(b[i]) << '\n';
      return kExitFailure;
    }
  }
  if (a.size() != b.size()) {
    std::cout << "diverged: logged " << a.size() << " events, replayed " << b.size()
              << '\n';
    return kExitFailure;
  }
  std::cout << "identical: " << a.size() << " events, "
            << aeroplan::to_string(replayed.outcome) << " (" << replayed.reason
            << ") at " << replayed.duration << " s\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aeroplan: spatial waypoint planning for a simulated quadrotor"};
  app.require_subcommand(1);

  std::string env_file;
  unsigned short port = 0;
  double speed = 1.0;
  std::optional<std::string> token;
  std::string log_dir;
  std::string record_file;
  auto* serve = app.add_subcommand("serve", "run a live session over WebSocket");
  serve->add_option("--env", env_file, "environment JSON (default: built-in lab)");
  serve->add_option("--port", port, "listen port (default: $AEROPLAN_PORT or 8765)");
  serve->add_option("--speed", speed, "simulation speed multiplier")
      ->check(CLI::PositiveNumber);
  serve->add_option("--token", token, "session token clients must present");
  serve->add_option("--log-dir", log_dir, "write finished trial logs here");
  serve->add_option("--record", record_file, "save inbound frames on exit");

  std::string agent_name;
  std::uint64_t seed = 1;
  std::string out_dir;
  int trial_index = 0;
  std::string subject;
  auto* trial = app.add_subcommand("trial", "run headless trials with a scripted agent");
  trial->add_option("--env", env_file, "environment JSON (default: built-in lab)");
  trial->add_option("--agent", agent_name, "oracle, indirect, manual, idle or rim")
      ->required();
  trial->add_option("--seed", seed, "base seed; trial i uses seed + i");
  trial->add_option("--out", out_dir, "output directory")->required();
  trial->add_option("--trial", trial_index, "run only this trial (1-based)");
  trial->add_option("--subject", subject, "subject label for measures.csv");

  std::string in_file;
  std::string measure;
  std::string survey_file;
  std::string csv_out;
  std::string plot_out;
  auto* stats = app.add_subcommand("stats", "repeated-measures analysis of a measure");
  stats->add_option("--in", in_file, "long-format CSV: subject,condition,measure,value");
  stats->add_option("--measure", measure, "measure to analyse")
      ->required()
      ->check(CLI::IsMember({"planning_time", "crashes", "usability"}));
  stats->add_option("--survey", survey_file, "survey CSV: subject,interface,q1..q5");
  stats->add_option("--csv-out", csv_out, "write the report as CSV");
  stats->add_option("--plot-out", plot_out, "write condition,mean,ci_low,ci_high");

  std::string log_file;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "re-run a trial log and compare");
  replay->add_option("--log", log_file, "trial log (JSON lines)")->required();
  replay->add_option("--out", replay_out, "write the replayed log here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serve) {
      if (serve->count("--port") == 0) port = aeroplan::net::default_port();
      return cmd_serve(env_file, port, speed, token, log_dir, record_file);
    }
    if (*trial) return cmd_trial(env_file, agent_name, seed, out_dir, trial_index, subject);
    if (*stats) return cmd_stats(in_file, measure, survey_file, csv_out, plot_out);
    if (*replay) return cmd_replay(log_file, replay_out);
  } catch (const aeroplan::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
