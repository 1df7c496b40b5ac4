#include "mcarl/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

const std::array<std::string, kNumRewardTerms>& reward_term_names() {
  static const std::array<std::string, kNumRewardTerms> names = {
      "lin",         "ang",           "feet_air_time",
      "energy",      "energy_eff",    "lin_vel_z",
      "ang_vel_xy",  "orientation",   "base_height",
      "torques",     "dof_vel",       "dof_acc",
      "action_rate", "collision",     "termination",
      "survival",    "dof_pos_limits", "dof_vel_limits",
      "torque_limits", "stand_still", "stumble",
      "feet_contact_forces"};
  return names;
}

RewardWeights RewardWeights::defaults() {
  RewardWeights rw;
  rw.sigma = 0.25;
  rw.w[kRewLin] = 3.0;
  rw.w[kRewAng] = 3.0;
  rw.w[kRewFeetAirTime] = 1.0;
  rw.w[kRewEnergy] = -1e-4;
  rw.w[kRewEnergyEfficiency] = 1e-7;
  rw.w[kRewLinVelZ] = -2.0;
  rw.w[kRewAngVelXy] = -0.05;
  rw.w[kRewOrientation] = -5.0;
  rw.w[kRewBaseHeight] = -1.0;
  rw.w[kRewTorques] = -1e-4;
  rw.w[kRewDofVel] = -1e-4;
  rw.w[kRewDofAcc] = -2.5e-7;
  rw.w[kRewActionRate] = -0.2;
  rw.w[kRewCollision] = -1.0;
  rw.w[kRewTermination] = -1.0;
  rw.w[kRewSurvival] = 0.0;
  rw.w[kRewDofPosLimits] = -10.0;
  rw.w[kRewDofVelLimits] = -10.0;
  rw.w[kRewTorqueLimits] = -10.0;
  rw.w[kRewStandStill] = -0.5;
  rw.w[kRewStumble] = -0.5;
  rw.w[kRewFeetContactForces] = -0.01;
  return rw;
}

void RewardWeights::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("tracking sigma must be > 0");
  if (!(w[kRewLin] > 0.0 && w[kRewAng] > 0.0)) {
    throw std::invalid_argument("task reward weights must be > 0");
  }
}

double tracking_reward(double err_sq, double sigma, double w) {
  return w * std::exp(-err_sq / sigma);
}

RewardBreakdown compute_rewards(const RobotState& prev, const RobotState& state,
                                const Action12& action,
                                const Action12& prev_action, const Command& cmd,
                                const RewardWeights& rw,
                                const RewardContext& ctx) {
  RewardBreakdown out;
  auto& t = out.terms;

  const double ex = state.base_vel.x() - cmd.vx;
  const double ey = state.base_vel.y() - cmd.vy;
  t[kRewLin] = std::exp(-(ex * ex + ey * ey) / rw.sigma);
  const double ew = state.yaw_rate - cmd.wz;
  t[kRewAng] = std::exp(-(ew * ew) / rw.sigma);

  for (int i = 0; i < kNumFeet; ++i) {
    if (state.touchdown[i]) t[kRewFeetAirTime] += state.air_time[i] - 0.5;
  }

  const double power = state.tau.dot(state.qd);
  t[kRewEnergy] = power;
  const double vxy =
      std::sqrt(state.base_vel.x() * state.base_vel.x() +
                state.base_vel.y() * state.base_vel.y());
  t[kRewEnergyEfficiency] = -std::abs(power / (vxy * ctx.dt + 1e-6));

  t[kRewLinVelZ] = state.height_vel * state.height_vel;
  t[kRewAngVelXy] = state.tilt_rate * state.tilt_rate;
  t[kRewOrientation] = state.projected_gravity.head<2>().squaredNorm();
  const double dh = state.base_pos.z() - ctx.h_target;
  t[kRewBaseHeight] = 2.0 * dh * dh;
  t[kRewTorques] = state.tau.squaredNorm();
  t[kRewDofVel] = state.qd.squaredNorm();
  t[kRewDofAcc] = ((state.qd - prev.qd) / ctx.dt).squaredNorm();
  t[kRewActionRate] = (action - prev_action).squaredNorm();
  t[kRewCollision] = static_cast<double>(state.collision_count);

  const bool failure = state.done == DoneReason::kFailure;
  t[kRewTermination] = failure ? 1.0 : 0.0;
  t[kRewSurvival] = failure ? 0.0 : 1.0;

  for (int j = 0; j < kNumJoints; ++j) {
    t[kRewDofPosLimits] += std::max(
        {0.0, ctx.q_min(j) - state.q(j), state.q(j) - ctx.q_max(j)});
    t[kRewDofVelLimits] +=
        std::clamp(std::abs(state.qd(j)) - ctx.qd_max, 0.0, 1.0);
    t[kRewTorqueLimits] +=
        std::max(0.0, std::abs(state.tau_raw(j)) - ctx.tau_max(j));
  }

  if (cmd.norm() < 0.1) {
    t[kRewStandStill] = (state.q - ctx.q_default).cwiseAbs().sum();
  }

  double stumble = 0.0;
  for (int i = 0; i < kNumFeet; ++i) {
    if (state.contact[i] &&
        state.foot_fxy[i] > 5.0 * std::abs(state.foot_fz[i])) {
      stumble = 1.0;
    }
  }
  t[kRewStumble] = stumble;

  for (int i = 0; i < kNumFeet; ++i) {
    const double f = std::sqrt(state.foot_fz[i] * state.foot_fz[i] +
                               state.foot_fxy[i] * state.foot_fxy[i]);
    t[kRewFeetContactForces] += std::max(0.0, f - ctx.foot_force_max);
  }

  out.total = 0.0;
  for (int k = 0; k < kNumRewardTerms; ++k) out.total += rw.w[k] * t[k];
  return out;
}

}  // namespace mcarl
