// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "aeroplan/detection.hpp"
#include "aeroplan/distributions.hpp"
#include "aeroplan/geometry.hpp"
#include "aeroplan/session.hpp"
#include "aeroplan/stats.hpp"
#include "aeroplan/trial.hpp"
#include "aeroplan/vehicle.hpp"
#include "aeroplan/world.hpp"
#include "support/calibrated.hpp"
#include "support/oracles.hpp"
#include "support/samples.hpp"

namespace {

using namespace aeroplan;
using Clock = std::chrono::steady_clock;

// Collects the first failed condition of a criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
  void below(double got, double limit, const std::string& what) {
    std::ostringstream s;
    s.precision(6);
    s << what << ": " << got << " not below " << limit;
    expect(got < limit, s.str());
  }
  void note(const std::string& n) { notes_ += (notes_.empty() ? "" : "; ") + n; }

  bool ok() const { return failure_.empty(); }
  const std::string& failure() const { return failure_; }
  const std::string& notes() const { return notes_; }

 private:
  std::string failure_;
  std::string notes_;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

int failures = 0;

void criterion(const std::string& name, const std::function<void(Checker&)>& body) {
  Checker c;
  const auto t0 = Clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << (c.ok() ? "PASS " : "FAIL ") << name << " (" << fmt(secs, 3) << " s)";
  if (!c.ok()) {
    std::cout << ": " << c.failure();
    ++failures;
  } else if (!c.notes().empty()) {
    std::cout << ": " << c.notes();
  }
  std::cout << std::endl;
}

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

void statistics_oracles(Checker& c) {
  const auto t0 = Clock::now();
  const auto anova = rm_anova(MeasureTable::from_rows({{1, 2}, {2, 4}, {3, 3}}));
  c.near(anova.F, 3.0, 1e-9, "anova fixture F");
  c.near(anova.p, 0.2254, 1e-4, "anova fixture p");

  double worst = 0.0;
  for (const double df2 : {2.0, 11.0, 22.0}) {
    const boost::math::students_t t(df2);
    for (int i = 1; i <= 100; ++i) {
      const double x = 0.05 * i * i / 10.0;
      const double identity = 2.0 * boost::math::cdf(t, std::sqrt(x)) - 1.0;
      worst = std::max(worst, std::abs(f_cdf(x, 1.0, df2) - identity));
    }
  }
  c.below(worst, 1e-8, "F cdf against t^2 identity");

  c.near(cronbach_alpha({{1, 2}, {2, 4}, {3, 6}}), 8.0 / 9.0, 1e-12, "cronbach fixture");

  const auto tukey = tukey_hsd(MeasureTable::from_rows({{1, 2, 4}, {2, 3, 3}, {3, 5, 6}, {2, 2, 5}}));
  const auto mc = aeroplan::testing::simulated_range_tail(tukey.q[0][2], 3, 6, 10'000'000, 20);
  c.near(tukey.p[0][2], mc.p, 3 * mc.se, "tukey p against 1e7 simulated draws");
  c.below(elapsed(t0), 60.0, "runtime s");
  c.note("tukey p " + fmt(tukey.p[0][2], 6) + " vs simulated " + fmt(mc.p, 6) + " (se " +
         fmt(mc.se, 2) + ")");
}

std::size_t index_of(const MeasureTable& t, const std::string& condition) {
  for (std::size_t i = 0; i < t.conditions.size(); ++i) {
    if (t.conditions[i] == condition) return i;
  }
  throw std::runtime_error("no condition " + condition);
}

void calibrated_pipeline(Checker& c) {
  const auto t0 = Clock::now();
  std::istringstream planning_in(aeroplan::testing::calibrated_planning_csv());
  const auto planning = analyze("planning_time", read_measure_table(planning_in, "planning_time"));
  c.expect(planning.anova.df1 == 1 && planning.anova.df2 == 11, "planning df (1, 11)");
  c.below(planning.anova.p, 1e-4, "planning time p");

  std::istringstream crashes_in(aeroplan::testing::calibrated_crashes_csv());
  const auto crashes = analyze("crashes", read_measure_table(crashes_in, "crashes"));
  c.expect(crashes.tukey.has_value(), "crash post hoc present");
  const auto& cp = crashes.tukey->p;
  const auto vr = index_of(crashes.table, "VR");
  const auto map = index_of(crashes.table, "Map2D");
  const auto manual = index_of(crashes.table, "Manual");
  c.below(cp[manual][vr], 0.0003, "crashes Manual vs VR p");
  c.below(cp[manual][map], 0.0003, "crashes Manual vs Map2D p");
  c.expect(cp[vr][map] > 0.05, "crashes VR vs Map2D p = " + fmt(cp[vr][map]) + " not above 0.05");

  std::istringstream survey_in(aeroplan::testing::calibrated_survey_csv());
  const auto rows = read_survey(survey_in);
  const auto usability = analyze("usability", usability_table(rows),
                                 cronbach_alpha(usability_item_matrix(rows)));
  const auto uvr = index_of(usability.table, "VR");
  const auto uman = index_of(usability.table, "Manual");
  const double gap = usability.anova.means[uvr] - usability.anova.means[uman];
  c.near(std::round(gap * 100.0) / 100.0, 5.58, 1e-9, "usability gap VR - Manual");
  c.below(usability.anova.p, 0.05, "usability anova p");
  c.below(usability.tukey->p[uvr][uman], 0.05, "usability VR vs Manual p");
  c.below(elapsed(t0), 30.0, "runtime s");
  c.note("planning " + format_p(planning.anova.p) + "; crashes Manual-VR " +
         format_p(cp[manual][vr]) + ", Manual-Map2D " + format_p(cp[manual][map]) +
         ", VR-Map2D " + format_p(cp[vr][map]) + "; usability gap " + fmt(gap, 3) + ", " +
         format_p(usability.tukey->p[uvr][uman]));
}

void tracking_soundness(Checker& c) {
  TrackerParams params;
  const double teb = compute_teb(params, 0.5);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    worst = std::max(worst, aeroplan::testing::random_episode_deviation(params, 0.5, seed));
  }
  c.expect(worst <= teb, "episode deviation " + fmt(worst, 6) + " exceeds teb " + fmt(teb, 6));

  Vehicle v({}, {1, 1, 0});
  v.takeoff();
  while (v.state().mode != FlightMode::kFlying) v.step({});
  const Vec3 target{1.3, 0.8, 0.7};
  v.hold(target);
  const int per_second = static_cast<int>(std::lround(1.0 / v.config().dt));
  for (int i = 0; i < 5 * per_second; ++i) v.step({});
  c.below(distance(v.state().position, target), 1e-3, "hover error after 5 s");

  TrackerParams fast;
  fast.accel_max = 1e3;
  DroneState s;
  s.position = {1, 0, 0};
  for (int i = 0; i < 1000; ++i) s = tracker_step(s, fast, {}, {}, {}, 1e-3);
  c.near(s.position.x, 3.0 * std::exp(-2.0), 1e-3, "closed-form error at 1 s");
  c.note("teb " + fmt(teb, 6) + " m, worst episode " + fmt(worst, 6) + " m");
}

void manual_mapping(Checker& c) {
  for (const double d : {0.0, 0.05, 0.1, -0.1, -0.07}) {
    c.expect(deflection_offset(d) == 0.0, "dead zone at " + fmt(d));
  }
  c.expect(deflection_offset(1.0) == 1.0 && deflection_offset(-1.0) == -1.0, "endpoint 1 m");
  const double jump = std::abs(deflection_offset(std::nextafter(kDeadZone, 1.0)) -
                               deflection_offset(kDeadZone));
  c.below(jump, 1e-9, "jump at the dead-zone edge");
  for (int i = 0; i <= 100000; ++i) {
    const double d = i / 100000.0;
    if (deflection_offset(-d) != -deflection_offset(d)) {
      c.expect(false, "odd symmetry at " + fmt(d, 17));
      break;
    }
  }
  DroneState s;
  s.mode = FlightMode::kFlying;
  s.position = {1, 1, 1};
  s.setpoint = {1.2, 1, 1};
  c.expect(manual_setpoint(s, {0.05, -0.1, 0.0}, lab_box()) == s.setpoint, "dead zone hovers");
  c.expect(manual_setpoint(s, {1.0, 0, 0}, lab_box()) == Vec3{2, 1, 1}, "full deflection");
}

Hoop probe_hoop() {
  Hoop h;
  h.label = "A";
  h.center = {1.5, 1.5, 1.2};
  h.normal = normalized({1, 1, 0});
  return h;
}

LabEnvironment one_hoop_lab() {
  LabEnvironment env;
  Hoop h;
  h.label = "A";
  h.center = {1.5, 1.5, 1.2};
  h.normal = {1, 0, 0};
  env.hoops = {h};
  env.trials = {{{"A"}, InterfaceTag::kVR}};
  env.sim.disturbance = false;
  return env;
}

std::optional<int> fixture_crash(const Vec3& first, const Vec3& second) {
  World w(one_hoop_lab(), 1);
  w.start_trial({{"A"}, InterfaceTag::kVR}, 1, "fixture");
  w.apply(AddWaypointCmd{first, std::nullopt});
  w.apply(AddWaypointCmd{second, std::nullopt});
  w.apply(TakeoffCmd{});
  for (int i = 0; i < 100000 && !w.trial_ended(); ++i) w.step();
  const auto crash = classify_crash(*w.trial_log(), w.sim().ground_window);
  if (!crash) return std::nullopt;
  return crash->definition;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void task_semantics(Checker& c) {
  constexpr double kBody = 0.07;
  const Hoop h = probe_hoop();
  const Vec3 tangent{-h.normal.y, h.normal.x, 0};
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int compared = 0;
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    auto point = [&] {
      return h.center + h.normal * (0.3 * u(gen)) + tangent * (0.25 * u(gen)) +
             Vec3{0, 0, 0.25 * u(gen)};
    };
    const Vec3 a = point();
    const Vec3 b = point();
    const auto oracle = aeroplan::testing::sampled_traversal(a, b, h, kBody);
    if (oracle.crossed && std::abs(oracle.margin) <= 1e-3) continue;
    ++compared;
    mismatches += detect_traversal(a, b, h, kBody) != oracle.direction;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " traversal mismatches");

  const auto env = default_environment();
  std::mt19937_64 gen2(47);
  std::uniform_real_distribution<double> v(0.0, 1.0);
  int collision_compared = 0;
  int collision_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Hoop& hh = env.hoops[gen2() % env.hoops.size()];
    const Vec3 t{-hh.normal.y, hh.normal.x, 0};
    const double th = 2 * M_PI * v(gen2);
    const double r = hh.core_radius() + 0.3 * (v(gen2) - 0.5);
    DroneState s;
    s.mode = FlightMode::kFlying;
    s.position = hh.center + (t * std::cos(th) + Vec3{0, 0, 1} * std::sin(th)) * r +
                 hh.normal * (0.24 * (v(gen2) - 0.5));
    if (i % 50 == 0) s.position.z = 0.02 * v(gen2);
    const auto oracle = aeroplan::testing::sampled_collisions(s, env, 0.01);
    if (oracle.margin < 1e-5) continue;
    ++collision_compared;
    collision_mismatches += detect_collisions(s, env, 0.01) != oracle.collisions;
  }
  c.expect(collision_mismatches == 0,
           std::to_string(collision_mismatches) + " collision mismatches");

  const Hoop& lab = one_hoop_lab().hoops[0];
  const Vec3 rim = lab.center + Vec3{0, lab.core_radius(), 0};
  const Vec3 rotor = Airframe{}.rotor_offsets[0];
  c.expect(fixture_crash(rim - rotor - Vec3{0.5, 0, 0}, rim - rotor + Vec3{0.5, 0, 0}) == 1,
           "rotor strike fixture is not definition 1");
  const double side = lab.core_radius() + lab.tube_radius + 0.065;
  c.expect(fixture_crash(lab.center + Vec3{0, side + 0.5, 0}, lab.center + Vec3{0, side, 0}) == 2,
           "body knock fixture is not definition 2");

  const auto& abcb = env.trials[0];
  c.expect(abcb.sequence == std::vector<std::string>{"A", "B", "C", "B"}, "first trial is A-B-C-B");
  DirectPlannerAgent oracle_agent;
  const auto run = run_trial(env, abcb, oracle_agent, 1);
  c.expect(run.outcome == Outcome::kSuccess && run.crashes == 0,
           "oracle agent on A-B-C-B: " + run.reason);

  const auto base = std::filesystem::temp_directory_path() / "aeroplan-acceptance-rerun";
  std::filesystem::remove_all(base);
  for (const char* dir : {"first", "second"}) {
    std::vector<TrialResult> results;
    for (std::size_t i = 0; i < env.trials.size(); ++i) {
      ManualPilotAgent agent;
      results.push_back(run_trial(env, env.trials[i], agent, 7 + i));
    }
    write_trial_outputs(base / dir, results, "S01");
  }
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "first")) {
    ++files;
    const auto twin = base / "second" / entry.path().filename();
    c.expect(slurp(entry.path()) == slurp(twin),
             "rerun differs in " + entry.path().filename().string());
  }
  c.expect(files >= 5, "rerun wrote " + std::to_string(files) + " files");
  std::filesystem::remove_all(base);
  c.note(std::to_string(compared) + " segments, " + std::to_string(collision_compared) +
         " states compared; A-B-C-B in " + fmt(run.duration) + " s");
}

EnvTransform random_transform(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {0.05 + 5.0 * u(gen), 4 * M_PI * (u(gen) - 0.5), 10 * (u(gen) - 0.5),
          10 * (u(gen) - 0.5)};
}

void geometry_invariants(Checker& c) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double round_trip = 0.0;
  double pinch = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto t = random_transform(gen);
    const Vec3 p{10 * u(gen) - 5, 10 * u(gen) - 5, 10 * u(gen) - 5};
    const Vec3 back = transform_point(
        t, transform_point(t, p, TransformDirection::kWorldToView), TransformDirection::kViewToWorld);
    round_trip = std::max(round_trip, distance(back, p));

    const Vec3 left{4 * u(gen), 4 * u(gen), 2 * u(gen)};
    const Vec3 right{4 * u(gen), 4 * u(gen), 2 * u(gen)};
    const Vec3 pivot = pinch_pivot(left, right);
    const auto next = pinch_scale(t, 0.01 + u(gen), 0.01 + 2 * u(gen), pivot);
    const Vec3 floor_pivot{pivot.x, pivot.y, 0.0};
    pinch = std::max(pinch, distance(transform_point(t, floor_pivot, TransformDirection::kViewToWorld),
                                     transform_point(next, floor_pivot, TransformDirection::kViewToWorld)));
    const Vec3 b = transform_point(t, pivot, TransformDirection::kViewToWorld);
    const Vec3 a = transform_point(next, pivot, TransformDirection::kViewToWorld);
    pinch = std::max(pinch, std::hypot(b.x - a.x, b.y - a.y));
  }
  c.below(round_trip, 1e-9, "transform round trip error");
  c.below(pinch, 1e-9, "pinch pivot drift");
  c.note("worst round trip " + fmt(round_trip, 3) + ", worst pivot drift " + fmt(pinch, 3));
}

void protocol(Checker& c) {
  const auto samples = aeroplan::testing::samples();
  c.expect(samples.size() == message_types().size(), "a sample for every message type");
  for (const auto& [type, msg] : samples) {
    const std::string golden = aeroplan::testing::read_golden(aeroplan::testing::golden_file(type));
    c.expect(!golden.empty(), "missing golden file for " + type);
    c.expect(encode(msg) == golden, "encoding differs from golden " + type);
    c.expect(aeroplan::testing::typed_round_trip(golden) == golden, "round trip of " + type);
  }

  const auto env = default_environment();
  const auto live = aeroplan::testing::recorded_two_client_run(env);
  c.expect(live.finished.size() == 1, "live session finished one trial");
  const auto file = std::filesystem::temp_directory_path() / "aeroplan-acceptance-recording.jsonl";
  save_recording(file, live.recording);
  const Session replayed = replay_session(env, {}, load_recording(file), 30000);
  std::filesystem::remove(file);
  c.expect(replayed.finished_trials().size() == 1, "replayed session finished one trial");
  if (live.finished.size() == 1 && replayed.finished_trials().size() == 1) {
    c.expect(aeroplan::testing::log_text(live.finished[0]) ==
                 aeroplan::testing::log_text(replayed.finished_trials()[0]),
             "replayed trial log differs");
    c.note(std::to_string(samples.size()) + " message types; replayed " +
           std::to_string(live.finished[0].events().size()) + " events from " +
           std::to_string(live.recording.size()) + " frames");
  }
}

}  // namespace

int main() {
  criterion("statistics oracles", statistics_oracles);
  criterion("calibrated study pipeline", calibrated_pipeline);
  criterion("tracking soundness", tracking_soundness);
  criterion("manual mapping", manual_mapping);
  criterion("task semantics", task_semantics);
  criterion("geometry invariants", geometry_invariants);
  criterion("protocol", protocol);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
