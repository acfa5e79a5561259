#pragma once

// Slow, independent reference implementations used to check the library.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "aeroplan/detection.hpp"
#include "aeroplan/environment.hpp"
#include "aeroplan/flightpath.hpp"
#include "aeroplan/geometry.hpp"
#include "aeroplan/vehicle.hpp"

namespace aeroplan::testing {

struct TraversalSample {
  std::optional<int> direction;
  // Radial distance of the sampled crossing minus the allowed radius; cases
  // within the sampling resolution of zero are ambiguous.
  double margin = 0.0;
  bool crossed = false;
};

// Walks the segment in steps of at most `step` metres, finds the sample pair
// that changes side of the hoop plane and measures the radius there.
TraversalSample sampled_traversal(const Vec3& a, const Vec3& b, const Hoop& hoop,
                                  double body_radius, double step = 1e-3);

// Distance to the hoop's core circle from a cloud of points on that circle.
double cloud_circle_distance(const Vec3& p, const Hoop& hoop,
                             std::size_t samples = 100000);

struct CollisionSample {
  std::vector<Collision> collisions;
  double margin = 1.0;  // smallest |distance - threshold| seen
};

CollisionSample sampled_collisions(const DroneState& state, const LabEnvironment& env,
                                   double ground_contact_height,
                                   std::size_t samples = 100000);

// Highlight by walking every segment at `step` metres.
struct SampledHighlight {
  Highlight highlight;
  bool ambiguous = false;  // a segment lies within one step of the radius
};
SampledHighlight sampled_highlight(const FlightPath& path, const SelectionZone& zone,
                            double step = 1e-3);

struct TailEstimate {
  double p = 0.0;
  double se = 0.0;
};

// P(range of k iid N(0,1) / sqrt(chi2_df / df) > q) by simulation.
TailEstimate simulated_range_tail(double q, int k, int df, std::size_t draws,
                                  std::uint64_t seed);

// Repeated-measures sums of squares written out cell by cell.
struct HandAnova {
  double ss_total = 0.0;
  double ss_conditions = 0.0;
  double ss_subjects = 0.0;
  double ss_error = 0.0;
  double F = 0.0;
  std::vector<double> means;
  double ms_error = 0.0;
};
HandAnova hand_anova(const std::vector<std::vector<double>>& rows);

// Maximum deviation from the reference over one randomized episode with a
// bounded disturbance drawn from `seed`.
double random_episode_deviation(const TrackerParams& params, double v_plan,
                                std::uint64_t seed);

}  // namespace aeroplan::testing
