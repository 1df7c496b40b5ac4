#pragma once

#include <array>
#include <string>

#include "mcarl/sim_types.hpp"

namespace mcarl {

enum RewardTerm : int {
  kRewLin = 0,
  kRewAng,
  kRewFeetAirTime,
  kRewEnergy,
  kRewEnergyEfficiency,
  kRewLinVelZ,
  kRewAngVelXy,
  kRewOrientation,
  kRewBaseHeight,
  kRewTorques,
  kRewDofVel,
  kRewDofAcc,
  kRewActionRate,
  kRewCollision,
  kRewTermination,
  kRewSurvival,
  kRewDofPosLimits,
  kRewDofVelLimits,
  kRewTorqueLimits,
  kRewStandStill,
  kRewStumble,
  kRewFeetContactForces,
  kNumRewardTerms,
};

const std::array<std::string, kNumRewardTerms>& reward_term_names();

struct RewardWeights {
  std::array<double, kNumRewardTerms> w{};
  double sigma = 0.25;  // tracking width

  static RewardWeights defaults();
  void validate() const;
};

struct RewardBreakdown {
  // raw (unweighted) term values
  std::array<double, kNumRewardTerms> terms{};
  double total = 0.0;

  double weighted(const RewardWeights& rw, int term) const {
    return rw.w[static_cast<size_t>(term)] * terms[static_cast<size_t>(term)];
  }
};

// env-level constants the reward formulas reference
struct RewardContext {
  double dt = 0.005;
  double h_target = 0.30;
  Joints12 q_default = Joints12::Zero();
  Joints12 q_min = Joints12::Zero();
  Joints12 q_max = Joints12::Zero();
  Joints12 tau_max = Joints12::Zero();
  double qd_max = 30.0;      // rad/s
  double foot_force_max = 100.0;  // N
};

// w * exp(-||v - v_cmd||^2 / sigma); used for both planar linear velocity
// and yaw-rate tracking
double tracking_reward(double err_sq, double sigma, double w);

RewardBreakdown compute_rewards(const RobotState& prev, const RobotState& state,
                                const Action12& action,
                                const Action12& prev_action, const Command& cmd,
                                const RewardWeights& rw,
                                const RewardContext& ctx);

}  // namespace mcarl
