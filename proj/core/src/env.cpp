#include "mcarl/env.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

namespace {
// leg order FL, FR, RL, RR; joints per leg: hip, thigh, calf
constexpr std::array<double, kNumFeet> kLegSide = {+1.0, -1.0, +1.0, -1.0};
constexpr double kMinInertia = 1e-3;  // kg m^2, keeps the PD loop stable at dt
}  // namespace

Joints12 EnvConfig::default_pose() {
  Joints12 q;
  for (int leg = 0; leg < kNumFeet; ++leg) {
    q(3 * leg + 0) = 0.0;   // hip
    q(3 * leg + 1) = 0.8;   // thigh
    q(3 * leg + 2) = -1.5;  // calf
  }
  return q;
}

// midpoints of the Table 1 joint-limit ranges, applied as constants
Joints12 EnvConfig::default_q_min() {
  Joints12 q;
  for (int leg = 0; leg < kNumFeet; ++leg) {
    q(3 * leg + 0) = -1.2015;
    q(3 * leg + 1) = -1.8235;
    q(3 * leg + 2) = -2.6615;
  }
  return q;
}

Joints12 EnvConfig::default_q_max() {
  Joints12 q;
  for (int leg = 0; leg < kNumFeet; ++leg) {
    q(3 * leg + 0) = 1.2015;
    q(3 * leg + 1) = 3.3945;
    q(3 * leg + 2) = 0.842;
  }
  return q;
}

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("env: dt must be > 0");
  if (episode_steps < 1) {
    throw std::invalid_argument("env: episode_steps must be >= 1");
  }
  if (!(h_target > 0.0)) throw std::invalid_argument("env: h_target <= 0");
}

SurrogateEnv::SurrogateEnv(const EnvConfig& cfg, const MorphologyRange& range)
    : cfg_(cfg), range_(range) {
  cfg_.validate();
  range_.validate();
}

void SurrogateEnv::reset(const MorphologyVector& m, const Command& cmd,
                         Rng& rng) {
  if (!range_.contains(m.values)) {
    throw std::invalid_argument("morphology out of range at reset");
  }
  morph_ = m;
  cmd_ = cmd;

  const Morph14& v = m.values;
  consts_.total_mass = v(kBaseMass) +
                       4.0 * (v(kHipMass) + v(kThighMass) + v(kCalfMass) +
                              v(kFootMass));
  consts_.leg_length = v(kThighToCalfLen) + v(kCalfToFootLen);
  for (int leg = 0; leg < kNumFeet; ++leg) {
    const double lh = 0.5 * v(kHipToThighLen);
    const double lt = 0.5 * v(kThighToCalfLen);
    const double lc = 0.5 * v(kCalfToFootLen);
    consts_.inertia(3 * leg + 0) = std::max(kMinInertia, v(kHipMass) * lh * lh);
    consts_.inertia(3 * leg + 1) =
        std::max(kMinInertia, v(kThighMass) * lt * lt);
    consts_.inertia(3 * leg + 2) =
        std::max(kMinInertia, (v(kCalfMass) + v(kFootMass)) * lc * lc);
    consts_.tau_max(3 * leg + 0) = v(kHipTorqueLimit);
    consts_.tau_max(3 * leg + 1) = cfg_.thigh_torque_limit;
    consts_.tau_max(3 * leg + 2) = v(kCalfTorqueLimit);
  }
  consts_.kp = v(kJointStiffness);
  consts_.kd = v(kJointDamping);
  consts_.action_scale = v(kActionScale);
  consts_.motor_strength = v(kMotorStrength);

  factors_ = PrivilegedFactors{};
  factors_.friction =
      cfg_.ground_friction * rng.uniform(cfg_.friction_min, cfg_.friction_max);
  factors_.payload = rng.uniform(cfg_.payload_min, cfg_.payload_max);
  for (int j = 0; j < kNumJoints; ++j) {
    factors_.motor_strength(j) =
        rng.uniform(1.0 - cfg_.motor_noise, 1.0 + cfg_.motor_noise);
  }
  factors_.contact_scale(0) =
      rng.uniform(cfg_.contact_scale_min, cfg_.contact_scale_max);
  factors_.contact_scale(1) =
      rng.uniform(cfg_.contact_scale_min, cfg_.contact_scale_max);
  consts_.total_mass += factors_.payload;

  state_ = RobotState{};
  state_.base_pos = Eigen::Vector3d(0, 0, cfg_.h_target);
  state_.q = cfg_.q_default;
  for (int j = 0; j < kNumJoints; ++j) {
    state_.q(j) += rng.uniform(-cfg_.reset_noise, cfg_.reset_noise);
  }
  prev_action_.setZero();
  push_rng_ = Rng(rng.next_u64());
}

RewardBreakdown SurrogateEnv::step(const Action12& action,
                                   const RewardWeights& rw) {
  if (!action.allFinite()) {
    throw std::invalid_argument("non-finite action");
  }
  const double dt = cfg_.dt;
  const RobotState prev = state_;
  RobotState& s = state_;

  // (1) joint targets
  Joints12 q_target;
  for (int leg = 0; leg < kNumFeet; ++leg) {
    q_target(3 * leg + 0) = cfg_.q_default(3 * leg + 0) +
                            consts_.action_scale * cfg_.hip_scale *
                                action(3 * leg + 0);
    q_target(3 * leg + 1) =
        cfg_.q_default(3 * leg + 1) + consts_.action_scale * action(3 * leg + 1);
    q_target(3 * leg + 2) =
        cfg_.q_default(3 * leg + 2) + consts_.action_scale * action(3 * leg + 2);
  }

  // (2) PD torques with per-joint limits
  s.prev_qd = s.qd;
  for (int j = 0; j < kNumJoints; ++j) {
    const double raw = consts_.motor_strength * factors_.motor_strength(j) *
                       (consts_.kp * (q_target(j) - s.q(j)) -
                        consts_.kd * s.qd(j));
    s.tau_raw(j) = raw;
    s.tau(j) = std::clamp(raw, -consts_.tau_max(j), consts_.tau_max(j));
  }

  // (3) joint integration, clamping to limits and zeroing velocity there
  for (int j = 0; j < kNumJoints; ++j) {
    s.qd(j) += s.tau(j) / consts_.inertia(j) * dt;
    s.q(j) += s.qd(j) * dt;
    if (s.q(j) < cfg_.q_min(j)) {
      s.q(j) = cfg_.q_min(j);
      s.qd(j) = 0.0;
    } else if (s.q(j) > cfg_.q_max(j)) {
      s.q(j) = cfg_.q_max(j);
      s.qd(j) = 0.0;
    }
  }

  // (4) gait clock and stance schedule
  s.gait_phase += 2.0 * M_PI * cfg_.gait_frequency * dt;
  if (s.gait_phase > 2.0 * M_PI) s.gait_phase -= 2.0 * M_PI;
  std::array<bool, kNumFeet> stance{};
  int n_stance = 0;
  for (int i = 0; i < kNumFeet; ++i) {
    stance[i] = std::sin(s.gait_phase + cfg_.phase_offsets[i]) < 0.0;
    if (stance[i]) ++n_stance;
  }

  // (5) reduced base model: stance-leg joint velocity -> thrust
  const double L = consts_.leg_length;
  const double mu = factors_.friction;
  double fwd = 0.0, lat = 0.0, yaw_drive = 0.0;
  for (int i = 0; i < kNumFeet; ++i) {
    if (!stance[i]) continue;
    const double thigh_sweep = -s.qd(3 * i + 1) * L;
    fwd += thigh_sweep;
    lat += -s.qd(3 * i + 0) * L;
    yaw_drive += kLegSide[i] * thigh_sweep;
  }
  const double M = consts_.total_mass;
  const double ax =
      cfg_.thrust_coeff * mu * fwd / M - cfg_.drag_coeff * s.base_vel.x();
  const double ay =
      cfg_.lateral_coeff * mu * lat / M - cfg_.drag_coeff * s.base_vel.y();
  const double yaw_acc =
      cfg_.yaw_coeff * mu * yaw_drive / M - cfg_.yaw_drag * s.yaw_rate;
  s.base_vel.x() += ax * dt;
  s.base_vel.y() += ay * dt;
  s.yaw_rate += yaw_acc * dt;
  s.yaw += s.yaw_rate * dt;
  const double c = std::cos(s.yaw), sn = std::sin(s.yaw);
  s.base_pos.x() += (c * s.base_vel.x() - sn * s.base_vel.y()) * dt;
  s.base_pos.y() += (sn * s.base_vel.x() + c * s.base_vel.y()) * dt;

  // optional push disturbance
  if (cfg_.push_enabled) {
    const int64_t interval =
        std::max<int64_t>(1, std::llround(cfg_.push_interval_s / dt));
    if ((s.step + 1) % interval == 0) {
      const double dvx =
          push_rng_.uniform(-cfg_.push_magnitude, cfg_.push_magnitude);
      const double dvy =
          push_rng_.uniform(-cfg_.push_magnitude, cfg_.push_magnitude);
      s.base_vel.x() += dvx;
      s.base_vel.y() += dvy;
      factors_.push_vel = Eigen::Vector2d(dvx, dvy);
    }
  }

  // (6) height / tilt proxies, critically damped, driven by saturation
  double excess = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    excess += std::max(0.0, std::abs(s.tau_raw(j)) - consts_.tau_max(j)) /
              consts_.tau_max(j);
  }
  const double disturb = std::max(0.0, excess - cfg_.saturation_deadband);
  {
    const double k = cfg_.height_spring, cdamp = 2.0 * std::sqrt(k);
    const double acc = -k * (s.base_pos.z() - cfg_.h_target) -
                       cdamp * s.height_vel -
                       cfg_.height_disturb_gain * disturb;
    s.height_vel += acc * dt;
    s.base_pos.z() += s.height_vel * dt;
  }
  {
    const double k = cfg_.tilt_spring, cdamp = 2.0 * std::sqrt(k);
    const double acc = -k * s.tilt - cdamp * s.tilt_rate +
                       cfg_.tilt_disturb_gain * disturb;
    s.tilt_rate += acc * dt;
    s.tilt += s.tilt_rate * dt;
  }
  s.base_vel.z() = s.height_vel;
  s.projected_gravity =
      Eigen::Vector3d(std::sin(s.tilt), 0.0, -std::cos(s.tilt));
  s.collision_count = std::abs(s.tilt) > 0.5 * cfg_.tilt_threshold ? 1 : 0;

  // (7) contacts, air time, proxy forces
  const double total_thrust = std::abs(cfg_.thrust_coeff * mu * fwd);
  for (int i = 0; i < kNumFeet; ++i) {
    const bool was = prev.contact[i] != 0;
    s.contact[i] = stance[i] ? 1 : 0;
    s.touchdown[i] = (stance[i] && !was) ? 1 : 0;
    if (stance[i]) {
      if (!was) {
        // keep the accumulated swing duration visible on the touchdown step
        s.air_time[i] = prev.air_time[i];
      } else {
        s.air_time[i] = 0.0;
      }
      s.foot_fz[i] = factors_.contact_scale(0) * M * cfg_.gravity /
                     std::max(1, n_stance);
      s.foot_fxy[i] =
          factors_.contact_scale(1) * total_thrust / std::max(1, n_stance);
    } else {
      s.air_time[i] = prev.air_time[i] + dt;
      s.foot_fz[i] = 0.0;
      s.foot_fxy[i] = 0.0;
    }
  }

  // (8) termination
  s.step += 1;
  if (s.base_pos.z() < cfg_.height_fail_frac * cfg_.h_target ||
      std::abs(s.tilt) > cfg_.tilt_threshold) {
    s.done = DoneReason::kFailure;
  } else if (s.step >= cfg_.episode_steps) {
    s.done = DoneReason::kTimeout;
  }

  if (!s.q.allFinite() || !s.base_vel.allFinite() ||
      !std::isfinite(s.base_pos.z())) {
    throw std::runtime_error("non-finite state in surrogate step");
  }

  RewardBreakdown rb =
      compute_rewards(prev, s, action, prev_action_, cmd_, rw,
                      reward_context());
  prev_action_ = action;
  return rb;
}

Eigen::VectorXd SurrogateEnv::observation() const {
  Eigen::VectorXd o(kObsDim);
  o.segment<3>(0) = state_.base_vel;
  o(3) = state_.tilt_rate;
  o(4) = 0.0;
  o(5) = state_.yaw_rate;
  o.segment<3>(6) = state_.projected_gravity;
  o(9) = cmd_.vx;
  o(10) = cmd_.vy;
  o(11) = cmd_.wz;
  o.segment<kNumJoints>(12) = state_.q - cfg_.q_default;
  o.segment<kNumJoints>(24) = state_.qd;
  o.segment<kNumJoints>(36) = prev_action_;
  return o;
}

Eigen::VectorXd SurrogateEnv::privileged_observation() const {
  Eigen::VectorXd p(kPrivDim);
  p(0) = factors_.friction;
  p(1) = factors_.payload;
  p.segment<kNumJoints>(2) = factors_.motor_strength;
  p.segment<2>(14) = factors_.push_vel;
  p.segment<2>(16) = factors_.contact_scale;
  return p;
}

RewardContext SurrogateEnv::reward_context() const {
  RewardContext ctx;
  ctx.dt = cfg_.dt;
  ctx.h_target = cfg_.h_target;
  ctx.q_default = cfg_.q_default;
  ctx.q_min = cfg_.q_min;
  ctx.q_max = cfg_.q_max;
  ctx.tau_max = consts_.tau_max;
  ctx.qd_max = cfg_.qd_max;
  ctx.foot_force_max = cfg_.foot_force_max;
  return ctx;
}

}  // namespace mcarl
