#pragma once

#include <cstdint>

#include "flatgrasp/decoder.hpp"
#include "flatgrasp/world.hpp"

namespace flatgrasp {

struct GraspParams {
  double squeeze_force = 40.0;          // N per arm
  double gravity = 9.81;                // m/s^2
  double lift_height = 0.45;            // m
  double antipodal_tolerance = 0.349065850398865915;  // 20 deg
  double max_com_offset = 0.04;         // m
  double min_face_height = 0.02;        // m
  double contact_noise = 0.003;         // m, Monte Carlo only
  int mc_trials = 0;                    // 0 = deterministic
  double mc_pass_fraction = 0.7;
  std::uint64_t mc_seed = 0;
};

// Throws InvalidArgument when a parameter is out of range.
void validate(const GraspParams& params);

struct GraspChecks {
  bool antipodal = false;
  double antipodal_angle = 0.0;   // worst of the three angles, rad
  bool friction = false;
  double friction_margin = 0.0;   // vertical support minus weight, N
  bool torque = false;
  double com_offset = 0.0;        // distance from CoM to segment AB, m
  bool face = false;
  double min_face_height = 0.0;   // m
};

struct GraspOutcome {
  bool evaluated = false;  // false for invalid plans
  bool success = false;
  GraspChecks checks;
  double mc_pass_fraction = 0.0;  // Monte Carlo mode only
  int reward = 0;
};

// Vertical friction support one contact face provides under squeeze force F:
// F * (mu * cos(bevel) - sin(bevel)). A chamfer (bevel > 0) wedges the object
// down; an undercut (bevel < 0) wedges it up.
double face_support(double squeeze_force, double friction, double bevel);

GraspOutcome evaluate(const GraspPlan& plan, const Scene& scene, const GraspParams& params = {});

inline int reward(const GraspOutcome& outcome) { return outcome.success ? 1 : 0; }

}  // namespace flatgrasp
