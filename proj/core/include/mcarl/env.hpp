#pragma once

#include <array>
#include <optional>

#include "mcarl/morphology.hpp"
#include "mcarl/rewards.hpp"
#include "mcarl/rng.hpp"
#include "mcarl/sim_types.hpp"

namespace mcarl {

struct EnvConfig {
  double dt = 0.005;              // s
  int episode_steps = 400;        // desk-scale default; 4000 = 20 s
  double gravity = 9.81;          // m/s^2
  double ground_friction = 1.0;   // nominal; realization randomized
  double gait_frequency = 2.5;    // Hz
  std::array<double, kNumFeet> phase_offsets = {0.0, M_PI, M_PI, 0.0};
  double h_target = 0.30;         // m

  // reduced base model coefficients
  double drag_coeff = 0.8;        // c_d, planar
  double thrust_coeff = 6.0;      // c_th, thigh-driven forward thrust
  double lateral_coeff = 3.0;     // hip-driven lateral thrust
  double yaw_coeff = 3.0;         // differential thrust -> yaw
  double yaw_drag = 1.5;
  double height_spring = 100.0;   // k_h; damping is critical
  double tilt_spring = 50.0;      // k_t
  double height_disturb_gain = 0.6;
  double tilt_disturb_gain = 1.2;
  double saturation_deadband = 1.0;  // summed excess ratio w/o disturbance

  // failure thresholds
  double height_fail_frac = 0.5;  // fail when h < frac * h_target
  double tilt_threshold = 0.5;    // rad

  double reset_noise = 0.05;      // joint angle noise at reset, rad

  // push disturbances (off by default)
  bool push_enabled = false;
  double push_interval_s = 2.0;
  double push_magnitude = 0.3;    // m/s

  // env-level joint constants (Table 1 rows not folded into the vector)
  double hip_scale = 0.4;
  double thigh_torque_limit = 25.0;  // Nm
  Joints12 q_default = default_pose();
  Joints12 q_min = default_q_min();
  Joints12 q_max = default_q_max();
  double qd_max = 30.0;           // rad/s
  double foot_force_max = 100.0;  // N

  // privileged factor randomization
  double friction_min = 0.6, friction_max = 1.25;
  double payload_min = -0.5, payload_max = 1.0;       // kg
  double motor_noise = 0.05;                          // +- fraction per joint
  double contact_scale_min = 0.9, contact_scale_max = 1.1;

  static Joints12 default_pose();
  static Joints12 default_q_min();
  static Joints12 default_q_max();
  void validate() const;
};

// simulator-only quantities, exposed through the privileged observation
struct PrivilegedFactors {
  double friction = 1.0;
  double payload = 0.0;                     // kg added to the base
  Joints12 motor_strength = Joints12::Ones();  // per-joint realization
  Eigen::Vector2d push_vel = Eigen::Vector2d::Zero();
  Eigen::Vector2d contact_scale = Eigen::Vector2d::Ones();  // (z, xy)
};

// constants derived from the morphology vector at reset
struct MorphConsts {
  double total_mass = 0.0;   // M, incl. payload
  double leg_length = 0.0;   // L
  Joints12 inertia = Joints12::Zero();
  Joints12 tau_max = Joints12::Zero();
  double kp = 0.0, kd = 0.0;
  double action_scale = 0.0;
  double motor_strength = 0.0;
};

// Morphology-parameterized quadruped surrogate. Joint-level PD dynamics
// with torque limits drive a reduced planar base model: stance-phase thigh
// velocity produces thrust, hip velocity lateral thrust, left/right
// asymmetry yaw; height and tilt proxies relax toward nominal and are
// disturbed by torque saturation excess. Every component of the morphology
// vector influences the dynamics (masses via M and inertia, lengths via L
// and inertia, gains/limits/scales via the torque path).
class SurrogateEnv {
 public:
  SurrogateEnv(const EnvConfig& cfg, const MorphologyRange& range);

  // fresh episode; throws if m is outside the configured range
  void reset(const MorphologyVector& m, const Command& cmd, Rng& rng);

  // advances one step; action is the 12-D normalized joint target offset
  RewardBreakdown step(const Action12& action, const RewardWeights& rw);

  bool done() const { return state_.done != DoneReason::kNotDone; }
  DoneReason done_reason() const { return state_.done; }

  Eigen::VectorXd observation() const;             // 48
  Eigen::VectorXd privileged_observation() const;  // 18

  const RobotState& state() const { return state_; }
  RobotState& mutable_state() { return state_; }
  const MorphologyVector& morphology() const { return morph_; }
  const Command& command() const { return cmd_; }
  const MorphConsts& derived() const { return consts_; }
  const PrivilegedFactors& factors() const { return factors_; }
  PrivilegedFactors& mutable_factors() { return factors_; }
  const EnvConfig& config() const { return cfg_; }
  const Action12& prev_action() const { return prev_action_; }

  RewardContext reward_context() const;

 private:
  EnvConfig cfg_;
  MorphologyRange range_;
  MorphologyVector morph_;
  Command cmd_;
  MorphConsts consts_;
  PrivilegedFactors factors_;
  RobotState state_;
  Action12 prev_action_ = Action12::Zero();
  Rng push_rng_;  // dedicated stream for push disturbances, seeded at reset

  friend struct EnvSnapshot;
};

}  // namespace mcarl
