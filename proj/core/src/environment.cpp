#include "aeroplan/environment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "aeroplan/error.hpp"

namespace aeroplan {

using nlohmann::json;

namespace {

Hoop make_hoop(std::string label, double angle_deg, double height) {
  constexpr double kSide = 1.5;
  const double circumradius = kSide / std::sqrt(3.0);
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double mid = kLabSide / 2.0;
  Hoop h;
  h.label = std::move(label);
  h.center = {mid + circumradius * std::cos(a), mid + circumradius * std::sin(a),
              height};
  // Opening faces along the triangle's circumcircle tangent.
  h.normal = {-std::sin(a), std::cos(a), 0.0};
  return h;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

void Hoop::validate() const {
  if (label.empty()) throw Error(ErrorCode::kConfigError, "hoop without label");
  if (!is_finite(center) || !is_finite(normal)) {
    throw Error(ErrorCode::kConfigError, "hoop " + label + " is not finite");
  }
  if (std::abs(normal.z) > 1e-12 || std::abs(norm(normal) - 1.0) > 1e-9) {
    throw Error(ErrorCode::kConfigError,
                "hoop " + label + " needs a horizontal unit normal");
  }
  if (!(tube_radius > 0.0 && inner_radius > tube_radius)) {
    throw Error(ErrorCode::kConfigError,
                "hoop " + label + " needs inner_radius > tube_radius > 0");
  }
}

std::string_view to_string(InterfaceTag tag) {
  switch (tag) {
    case InterfaceTag::kVR: return "VR";
    case InterfaceTag::kMap2D: return "Map2D";
    case InterfaceTag::kManual: return "Manual";
  }
  return "VR";
}

std::optional<InterfaceTag> interface_tag_from_string(std::string_view name) {
  for (auto t : {InterfaceTag::kVR, InterfaceTag::kMap2D, InterfaceTag::kManual}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

const Hoop* LabEnvironment::find(std::string_view label) const {
  for (const auto& h : hoops) {
    if (h.label == label) return &h;
  }
  return nullptr;
}

void LabEnvironment::validate() const {
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y &&
        bounds.min.z < bounds.max.z)) {
    throw Error(ErrorCode::kConfigError, "lab bounds are empty");
  }
  if (!bounds.contains(start) || start.z != 0.0) {
    throw Error(ErrorCode::kConfigError, "start pad must be on the lab floor");
  }
  std::set<std::string> labels;
  for (const auto& h : hoops) {
    h.validate();
    if (!labels.insert(h.label).second) {
      throw Error(ErrorCode::kConfigError, "duplicate hoop label " + h.label);
    }
    // The whole torus must fit: extent is core radius + tube in the hoop
    // plane, tube radius along the normal.
    const double reach = h.core_radius() + h.tube_radius;
    const Vec3 side = cross(h.normal, {0.0, 0.0, 1.0});
    for (double s : {-1.0, 1.0}) {
      for (const Vec3& axis : {side * reach, Vec3{0.0, 0.0, reach},
                               h.normal * h.tube_radius}) {
        if (!bounds.contains(h.center + axis * s)) {
          throw Error(ErrorCode::kConfigError,
                      "hoop " + h.label + " extends outside the lab");
        }
      }
    }
  }
  for (const auto& trial : trials) {
    if (trial.sequence.empty()) {
      throw Error(ErrorCode::kConfigError, "trial with empty hoop sequence");
    }
    for (const auto& label : trial.sequence) {
      if (!find(label)) {
        throw Error(ErrorCode::kConfigError, "trial names unknown hoop " + label);
      }
    }
  }
  if (!(sim.ground_window >= 0.0) || !(sim.timeout > 0.0) ||
      !(sim.knock_delay >= 0.0)) {
    throw Error(ErrorCode::kConfigError, "bad trial timing constants");
  }
}

LabEnvironment default_environment() {
  LabEnvironment env;
  env.hoops = {make_hoop("A", 90.0, 0.8), make_hoop("B", 210.0, 1.2),
               make_hoop("C", 330.0, 1.6)};
  env.trials = {{{"A", "B", "C", "B"}, InterfaceTag::kVR},
                {{"C", "A", "B"}, InterfaceTag::kVR},
                {{"B", "C", "A"}, InterfaceTag::kVR}};
  return env;
}

// --- JSON -----------------------------------------------------------------

void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }

void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) {
    throw json::type_error::create(302, "expected [x, y, z]", &j);
  }
  v = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

void to_json(json& j, const Hoop& h) {
  j = json{{"label", h.label},
           {"center", h.center},
           {"normal", h.normal},
           {"inner_radius", h.inner_radius},
           {"tube_radius", h.tube_radius}};
}

void from_json(const json& j, Hoop& h) {
  h = Hoop{};
  j.at("label").get_to(h.label);
  j.at("center").get_to(h.center);
  read_if(j, "normal", h.normal);
  read_if(j, "inner_radius", h.inner_radius);
  read_if(j, "tube_radius", h.tube_radius);
}

void to_json(json& j, const TrialSpec& t) {
  j = json{{"sequence", t.sequence},
           {"interface_tag", std::string(to_string(t.interface_tag))}};
}

void from_json(const json& j, TrialSpec& t) {
  t = TrialSpec{};
  j.at("sequence").get_to(t.sequence);
  if (auto it = j.find("interface_tag"); it != j.end()) {
    auto tag = interface_tag_from_string(it->get<std::string>());
    if (!tag) {
      throw Error(ErrorCode::kConfigError,
                  "unknown interface tag " + it->get<std::string>());
    }
    t.interface_tag = *tag;
  }
}

json sim_config_to_json(const SimConfig& sim) {
  const auto& v = sim.vehicle;
  json rotors = json::array();
  for (const auto& r : v.airframe.rotor_offsets) rotors.push_back(r);
  return json{{"ground_window", sim.ground_window},
              {"timeout", sim.timeout},
              {"knock_delay", sim.knock_delay},
              {"disturbance", sim.disturbance},
              {"dt", v.dt},
              {"v_plan", v.v_plan},
              {"v_climb", v.v_climb},
              {"hover_altitude", v.hover_altitude},
              {"gravity", v.gravity},
              {"ground_contact_height", v.ground_contact_height},
              {"body_radius", v.airframe.body_radius},
              {"rotor_offsets", rotors},
              {"tracker",
               {{"kp", v.tracker.kp},
                {"kd", v.tracker.kd},
                {"accel_max", v.tracker.accel_max},
                {"disturb_max", v.tracker.disturb_max},
                {"teb", v.tracker.teb}}}};
}

SimConfig sim_config_from_json(const json& j, SimConfig base) {
  SimConfig sim = std::move(base);
  auto& v = sim.vehicle;
  read_if(j, "ground_window", sim.ground_window);
  read_if(j, "timeout", sim.timeout);
  read_if(j, "knock_delay", sim.knock_delay);
  read_if(j, "disturbance", sim.disturbance);
  read_if(j, "dt", v.dt);
  read_if(j, "v_plan", v.v_plan);
  read_if(j, "v_climb", v.v_climb);
  read_if(j, "hover_altitude", v.hover_altitude);
  read_if(j, "gravity", v.gravity);
  read_if(j, "ground_contact_height", v.ground_contact_height);
  read_if(j, "body_radius", v.airframe.body_radius);
  if (auto it = j.find("rotor_offsets"); it != j.end()) {
    if (!it->is_array() || it->size() != 4) {
      throw Error(ErrorCode::kConfigError, "rotor_offsets needs four entries");
    }
    for (std::size_t i = 0; i < 4; ++i) {
      v.airframe.rotor_offsets[i] = it->at(i).get<Vec3>();
    }
  }
  if (auto it = j.find("tracker"); it != j.end()) {
    read_if(*it, "kp", v.tracker.kp);
    read_if(*it, "kd", v.tracker.kd);
    read_if(*it, "accel_max", v.tracker.accel_max);
    read_if(*it, "disturb_max", v.tracker.disturb_max);
    read_if(*it, "teb", v.tracker.teb);
  }
  return sim;
}

json environment_to_json(const LabEnvironment& env) {
  return json{{"bounds", {{"min", env.bounds.min}, {"max", env.bounds.max}}},
              {"start", env.start},
              {"hoops", env.hoops},
              {"trials", env.trials},
              {"sim", sim_config_to_json(env.sim)}};
}

LabEnvironment environment_from_json(const json& doc) {
  try {
    LabEnvironment env;
    if (auto it = doc.find("bounds"); it != doc.end()) {
      it->at("min").get_to(env.bounds.min);
      it->at("max").get_to(env.bounds.max);
    }
    read_if(doc, "start", env.start);
    read_if(doc, "hoops", env.hoops);
    read_if(doc, "trials", env.trials);
    if (auto it = doc.find("sim"); it != doc.end()) {
      env.sim = sim_config_from_json(*it);
    }
    env.validate();
    env.sim.vehicle.tracker.validate();
    return env;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

LabEnvironment load_environment(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorCode::kConfigError, "cannot read " + file.string());
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, file.string() + ": " + e.what());
  }
  return environment_from_json(doc);
}

}  // namespace aeroplan
