#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeroplan/geometry.hpp"
#include "aeroplan/vehicle.hpp"

namespace aeroplan {

// A torus hoop standing with its opening facing along a horizontal normal.
// inner_radius is the clear opening; the tube's core circle has radius
// inner_radius + tube_radius.
struct Hoop {
  std::string label;
  Vec3 center;
  Vec3 normal{1.0, 0.0, 0.0};
  double inner_radius = 0.21;
  double tube_radius = 0.02;

  double core_radius() const { return inner_radius + tube_radius; }
  // Throws kConfigError.
  void validate() const;

  friend bool operator==(const Hoop&, const Hoop&) = default;
};

enum class InterfaceTag { kVR, kMap2D, kManual };

std::string_view to_string(InterfaceTag tag);
std::optional<InterfaceTag> interface_tag_from_string(std::string_view name);

struct TrialSpec {
  std::vector<std::string> sequence;
  InterfaceTag interface_tag = InterfaceTag::kVR;

  friend bool operator==(const TrialSpec&, const TrialSpec&) = default;
};

// Simulation constants shared by live sessions and headless trials.
struct SimConfig {
  VehicleConfig vehicle;
  double ground_window = 2.0;  // s between hoop contact and floor contact
  double timeout = 300.0;      // s of simulated time per trial
  double knock_delay = 0.1;    // s from a body-only hoop contact to loss of control
  bool disturbance = true;     // inject the bounded disturbance process
};

struct LabEnvironment {
  Box bounds = lab_box();
  Vec3 start{0.4, 0.4, 0.0};
  std::vector<Hoop> hoops;
  std::vector<TrialSpec> trials;
  SimConfig sim;

  const Hoop* find(std::string_view label) const;
  // Throws kConfigError: hoops outside bounds, duplicate labels, trials
  // naming unknown hoops, empty trials.
  void validate() const;
};

// Three hoops A/B/C at 0.8/1.2/1.6 m on a 1.5 m triangle centred in the lab,
// with the default trial set A-B-C-B, C-A-B, B-C-A.
LabEnvironment default_environment();

// Environment files are JSON documents; unspecified keys take defaults.
nlohmann::json environment_to_json(const LabEnvironment& env);
LabEnvironment environment_from_json(const nlohmann::json& doc);
LabEnvironment load_environment(const std::filesystem::path& file);

nlohmann::json sim_config_to_json(const SimConfig& sim);
SimConfig sim_config_from_json(const nlohmann::json& doc, SimConfig base = {});

void to_json(nlohmann::json& j, const Vec3& v);
void from_json(const nlohmann::json& j, Vec3& v);
void to_json(nlohmann::json& j, const Hoop& h);
void from_json(const nlohmann::json& j, Hoop& h);
void to_json(nlohmann::json& j, const TrialSpec& t);
void from_json(const nlohmann::json& j, TrialSpec& t);

}  // namespace aeroplan
