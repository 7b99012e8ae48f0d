#include "flatgrasp/outcome.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

void validate(const GraspParams& p) {
  if (!(p.squeeze_force > 0.0)) throw InvalidArgument("squeeze_force must be positive");
  if (!(p.gravity > 0.0)) throw InvalidArgument("gravity must be positive");
  if (!(p.antipodal_tolerance > 0.0 && p.antipodal_tolerance < std::numbers::pi / 2))
    throw InvalidArgument("antipodal_tolerance must be in (0, pi/2)");
  if (!(p.max_com_offset > 0.0)) throw InvalidArgument("max_com_offset must be positive");
  if (p.mc_trials < 0) throw InvalidArgument("mc_trials must be >= 0");
  if (!(p.contact_noise >= 0.0)) throw InvalidArgument("contact_noise must be >= 0");
}

double face_support(double squeeze_force, double friction, double bevel) {
  return squeeze_force * (friction * std::cos(bevel) - std::sin(bevel));
}

namespace {

// Geometry-dependent checks; friction and face do not move with the contacts.
void geometric_checks(Vec2 a, Vec2 b, Vec2 na, Vec2 nb, Vec2 com, const GraspParams& p, GraspChecks& c) {
  const Vec2 ab = normalized(b - a);
  const double opposed = angle_between(na, nb * -1.0);
  const double at_a = angle_between(na, ab);
  const double at_b = angle_between(nb, ab * -1.0);
  c.antipodal_angle = std::max({opposed, at_a, at_b});
  c.antipodal = c.antipodal_angle <= p.antipodal_tolerance;
  c.com_offset = distance_to_segment(com, a, b);
  c.torque = c.com_offset <= p.max_com_offset;
}

}  // namespace

GraspOutcome evaluate(const GraspPlan& plan, const Scene& scene, const GraspParams& params) {
  GraspOutcome out;
  if (!plan.valid) return out;
  out.evaluated = true;

  const ObjectModel& obj = scene.object;
  const Vec2 com = scene.center_of_mass();
  GraspChecks& c = out.checks;

  const double support = face_support(params.squeeze_force, obj.friction, plan.side_a.face_bevel) +
                         face_support(params.squeeze_force, obj.friction, plan.side_b.face_bevel);
  c.friction_margin = support - obj.mass * params.gravity;
  c.friction = c.friction_margin >= 0.0;
  c.min_face_height = std::min(plan.side_a.face_height, plan.side_b.face_height);
  c.face = c.min_face_height >= params.min_face_height;

  const Vec2 na = plan.side_a.inward_normal, nb = plan.side_b.inward_normal;
  geometric_checks(plan.side_a.contact, plan.side_b.contact, na, nb, com, params, c);

  if (params.mc_trials <= 0) {
    out.success = c.antipodal && c.friction && c.torque && c.face;
  } else {
    // Contacts slide along the local tangent; normals stay with the face.
    Rng rng(hash_seed(params.mc_seed, {0x3c7ULL}));
    const Vec2 ta{-na.y, na.x}, tb{-nb.y, nb.x};
    int passes = 0;
    for (int k = 0; k < params.mc_trials; ++k) {
      const Vec2 a = plan.side_a.contact + ta * (params.contact_noise * rng.normal());
      const Vec2 b = plan.side_b.contact + tb * (params.contact_noise * rng.normal());
      GraspChecks trial = c;
      geometric_checks(a, b, na, nb, com, params, trial);
      if (trial.antipodal && trial.torque && trial.friction && trial.face) ++passes;
    }
    out.mc_pass_fraction = static_cast<double>(passes) / params.mc_trials;
    out.success = out.mc_pass_fraction >= params.mc_pass_fraction;
  }
  out.reward = out.success ? 1 : 0;
  return out;
}

}  // namespace flatgrasp
