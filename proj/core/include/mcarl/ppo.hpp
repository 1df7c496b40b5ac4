#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "mcarl/policy.hpp"
#include "mcarl/rng.hpp"

namespace mcarl {

struct PPOConfig {
  double clip_eps = 0.2;
  double value_coeff = 1.0;      // c_v
  double entropy_coeff = 0.01;   // c_e
  double learning_rate = 1e-3;
  double adaptation_lr = 1e-3;   // student regression
  int epochs = 5;
  int minibatches = 4;
  double gamma = 0.99;
  double lam = 0.95;             // GAE lambda
  double desired_kl = 0.01;
  double max_grad_norm = 1.0;
  int rollout_horizon = 24;      // steps per env per iteration
  double lr_min = 1e-5;
  double lr_max = 1e-2;

  void validate() const;
};

// rectangular rollout storage: columns index (env, step) as e * H + t
struct TransitionBatch {
  int num_envs = 0;
  int horizon = 0;

  Eigen::MatrixXd obs;        // 48 x N*H
  Eigen::MatrixXd priv;       // 18 x N*H
  Eigen::MatrixXd hist;       // 1800 x N*H
  Eigen::MatrixXd morph;      // 14 x N*H (already variant-masked)
  Eigen::MatrixXd actions;    // 12 x N*H
  Eigen::MatrixXd mu_old;     // 12 x N*H (behavior means)
  Eigen::VectorXd log_std_old;  // 12
  Eigen::VectorXd logp_old;   // N*H
  Eigen::VectorXd values;     // N*H
  Eigen::VectorXd rewards;    // N*H
  Eigen::VectorXd tracking_rewards;  // N*H, weighted r_lin + r_ang
  Eigen::VectorXd dones;      // N*H, 1.0 where episode ended at that step
  Eigen::VectorXd bootstrap;  // N, V(s_H) per env

  Eigen::VectorXd advantages;  // filled by compute_gae
  Eigen::VectorXd returns;

  int size() const { return num_envs * horizon; }
  int col(int env, int t) const { return env * horizon + t; }
  void allocate(int n_envs, int h);
};

// delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
// A_t = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// R_t = A_t + V_t
// Fills batch.advantages (unnormalized) and batch.returns.
void compute_gae(TransitionBatch& batch, double gamma, double lam);

// normalize to zero mean / unit std (in place); no-op guard for tiny std
void normalize_advantages(Eigen::VectorXd& adv);

// -min(r * A, clip(r, 1-eps, 1+eps) * A) for a single sample
double ppo_surrogate_loss(double ratio, double advantage, double clip_eps);

// 0.5 * max((V - R)^2, (V_old + clip(V - V_old, -eps, eps) - R)^2)
double ppo_value_loss(double v, double v_old, double ret, double clip_eps);

// adaptive schedule: KL > 2*desired -> lr / 1.5, KL < desired/2 -> lr * 1.5,
// clamped to [lr_min, lr_max]
double kl_adaptive_lr(double lr, double observed_kl, double desired_kl,
                      double lr_min = 1e-5, double lr_max = 1e-2);

struct PpoUpdateStats {
  double mean_kl = 0.0;
  double surrogate_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double student_loss = 0.0;
  double learning_rate = 0.0;
};

// One PPO update over the batch: epochs x minibatches of clipped surrogate
// + value loss + entropy bonus, gradients through actor, critic, teacher
// encoder and morphology encoder jointly; the student adaptation module is
// regressed onto teacher latents in the same pass (separate optimizer, no
// gradient into the teacher). `lr` is read and updated (KL-adaptive).
// When use_morph_latent is false the latent fed to actor/critic is zero
// and the morphology encoder receives no gradient.
PpoUpdateStats ppo_update(McarlPolicy& policy, TransitionBatch& batch,
                          const PPOConfig& cfg, double& lr, Rng& rng,
                          bool use_morph_latent = true);

}  // namespace mcarl
