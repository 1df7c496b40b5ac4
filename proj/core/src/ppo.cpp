#include "mcarl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcarl {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;
}

void PPOConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) {
    throw std::invalid_argument("ppo: clip_eps must be in (0, 1)");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("ppo: gamma must be in (0, 1]");
  }
  if (!(lam >= 0.0 && lam <= 1.0)) {
    throw std::invalid_argument("ppo: lambda must be in [0, 1]");
  }
  if (epochs < 1 || minibatches < 1 || rollout_horizon < 1) {
    throw std::invalid_argument("ppo: counts must be >= 1");
  }
}

void TransitionBatch::allocate(int n_envs, int h) {
  num_envs = n_envs;
  horizon = h;
  const int n = n_envs * h;
  obs.setZero(kObsDim, n);
  priv.setZero(kPrivDim, n);
  hist.setZero(kHistoryDim, n);
  morph.setZero(kMorphDim, n);
  actions.setZero(kActionDim, n);
  mu_old.setZero(kActionDim, n);
  log_std_old.setZero(kActionDim);
  logp_old.setZero(n);
  values.setZero(n);
  rewards.setZero(n);
  tracking_rewards.setZero(n);
  dones.setZero(n);
  bootstrap.setZero(n_envs);
  advantages.resize(0);
  returns.resize(0);
}

void compute_gae(TransitionBatch& batch, double gamma, double lam) {
  const int n = batch.size();
  batch.advantages.setZero(n);
  batch.returns.setZero(n);
  for (int e = 0; e < batch.num_envs; ++e) {
    double next_adv = 0.0;
    double next_value = batch.bootstrap(e);
    for (int t = batch.horizon - 1; t >= 0; --t) {
      const int i = batch.col(e, t);
      const double not_done = 1.0 - batch.dones(i);
      const double delta = batch.rewards(i) +
                           gamma * next_value * not_done - batch.values(i);
      next_adv = delta + gamma * lam * not_done * next_adv;
      batch.advantages(i) = next_adv;
      batch.returns(i) = next_adv + batch.values(i);
      next_value = batch.values(i);
    }
  }
}

void normalize_advantages(Eigen::VectorXd& adv) {
  const double mean = adv.mean();
  adv.array() -= mean;
  const double std = std::sqrt(adv.squaredNorm() / adv.size());
  if (std > 1e-12) adv /= std;
}

double ppo_surrogate_loss(double ratio, double advantage, double clip_eps) {
  const double clipped =
      std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
  return -std::min(ratio * advantage, clipped);
}

double ppo_value_loss(double v, double v_old, double ret, double clip_eps) {
  const double a = v - ret;
  const double v_clip = v_old + std::clamp(v - v_old, -clip_eps, clip_eps);
  const double b = v_clip - ret;
  return 0.5 * std::max(a * a, b * b);
}

double kl_adaptive_lr(double lr, double observed_kl, double desired_kl,
                      double lr_min, double lr_max) {
  if (observed_kl > 2.0 * desired_kl) {
    lr /= 1.5;
  } else if (observed_kl < 0.5 * desired_kl) {
    lr *= 1.5;
  }
  return std::clamp(lr, lr_min, lr_max);
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& idx,
                       int begin, int count) {
  Eigen::MatrixXd out(m.rows(), count);
  for (int k = 0; k < count; ++k) out.col(k) = m.col(idx[begin + k]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx,
                       int begin, int count) {
  Eigen::VectorXd out(count);
  for (int k = 0; k < count; ++k) out(k) = v(idx[begin + k]);
  return out;
}

}  // namespace

PpoUpdateStats ppo_update(McarlPolicy& policy, TransitionBatch& batch,
                          const PPOConfig& cfg, double& lr, Rng& rng,
                          bool use_morph_latent) {
  cfg.validate();
  const int n_total = batch.size();
  if (batch.advantages.size() != n_total) {
    throw std::logic_error("ppo_update: compute_gae must run first");
  }

  Eigen::VectorXd adv = batch.advantages;
  normalize_advantages(adv);

  std::vector<int> idx(n_total);
  std::iota(idx.begin(), idx.end(), 0);

  ParamStore& store = policy.store();
  AdamConfig adam;
  adam.max_grad_norm = cfg.max_grad_norm;

  PpoUpdateStats stats;
  int n_updates = 0;

  const Eigen::VectorXd log_std_behavior = batch.log_std_old;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates shuffle
    for (int i = n_total - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_index(i + 1));
      std::swap(idx[i], idx[j]);
    }
    for (int mb = 0; mb < cfg.minibatches; ++mb) {
      const int begin = mb * n_total / cfg.minibatches;
      const int end = (mb + 1) * n_total / cfg.minibatches;
      const int n = end - begin;
      if (n == 0) continue;

      Eigen::MatrixXd obs_mb = gather(batch.obs, idx, begin, n);
      Eigen::MatrixXd priv_mb = gather(batch.priv, idx, begin, n);
      Eigen::MatrixXd morph_mb = gather(batch.morph, idx, begin, n);
      Eigen::MatrixXd act_mb = gather(batch.actions, idx, begin, n);
      Eigen::MatrixXd mu_old_mb = gather(batch.mu_old, idx, begin, n);
      Eigen::VectorXd logp_old_mb = gather(batch.logp_old, idx, begin, n);
      Eigen::VectorXd v_old_mb = gather(batch.values, idx, begin, n);
      Eigen::VectorXd adv_mb = gather(adv, idx, begin, n);
      Eigen::VectorXd ret_mb = gather(batch.returns, idx, begin, n);

      Eigen::MatrixXd z_m =
          use_morph_latent
              ? policy.morph_net().forward_cached(morph_mb)
              : Eigen::MatrixXd::Zero(MorphologyEncoder::kLatent, n);
      Eigen::MatrixXd extr = policy.teacher_net().forward_cached(priv_mb);
      Eigen::MatrixXd x = McarlPolicy::assemble_input(obs_mb, extr, z_m);
      Eigen::MatrixXd mu = policy.actor_net().forward_cached(x);
      Eigen::MatrixXd v_row = policy.critic_net().forward_cached(x);

      const Eigen::VectorXd log_std = policy.log_std();
      const Eigen::ArrayXd sigma = log_std.array().exp();
      const Eigen::ArrayXd inv_sigma = 1.0 / sigma;

      // new log-probs and per-sample gradient seeds
      Eigen::MatrixXd z = (act_mb - mu).array().colwise() * inv_sigma;
      Eigen::VectorXd logp_new =
          (-0.5 * z.array().square().colwise().sum()).transpose().matrix();
      logp_new.array() +=
          -log_std.sum() - kActionDim * kLogSqrt2Pi;

      double surr_loss = 0.0, v_loss = 0.0, kl_sum = 0.0;
      Eigen::MatrixXd d_mu(kActionDim, n);
      Eigen::MatrixXd d_v(1, n);
      Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(kActionDim);

      const Eigen::ArrayXd sigma_old = log_std_behavior.array().exp();
      const double log_std_diff_sum =
          (log_std - log_std_behavior).sum();
      const Eigen::ArrayXd var_ratio =
          (sigma_old * sigma_old) / (sigma * sigma);

      for (int k = 0; k < n; ++k) {
        const double ratio = std::exp(logp_new(k) - logp_old_mb(k));
        const double A = adv_mb(k);
        const double unclipped = ratio * A;
        const double clipped =
            std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * A;
        surr_loss += -std::min(unclipped, clipped);
        double g_logp = 0.0;
        if (unclipped <= clipped) g_logp = -A * ratio / n;

        // d logp / d mu = z / sigma ; d logp / d log_std = z^2 - 1
        d_mu.col(k) = g_logp * (z.col(k).array() * inv_sigma).matrix();
        d_log_std += g_logp * (z.col(k).array().square() - 1.0).matrix();

        const double v = v_row(0, k);
        const double v_old = v_old_mb(k);
        const double ret = ret_mb(k);
        const double a = v - ret;
        const double v_clip =
            v_old + std::clamp(v - v_old, -cfg.clip_eps, cfg.clip_eps);
        const double b = v_clip - ret;
        v_loss += 0.5 * std::max(a * a, b * b);
        double g_v;
        if (a * a >= b * b) {
          g_v = a;
        } else {
          g_v = (std::abs(v - v_old) < cfg.clip_eps) ? b : 0.0;
        }
        d_v(0, k) = cfg.value_coeff * g_v / n;

        // exact diagonal-Gaussian KL(old || new)
        const Eigen::ArrayXd dmu =
            (mu_old_mb.col(k) - mu.col(k)).array();
        kl_sum += log_std_diff_sum +
                  0.5 * (var_ratio + dmu.square() / (sigma * sigma)).sum() -
                  0.5 * kActionDim;
      }
      surr_loss /= n;
      v_loss /= n;
      const double kl = kl_sum / n;
      const double entropy = gaussian_entropy(log_std);

      // entropy bonus: -c_e * S, dS/dlog_std_i = 1
      d_log_std.array() -= cfg.entropy_coeff;

      store.zero_grad();
      Eigen::MatrixXd dx = policy.actor_net().backward(d_mu);
      dx += policy.critic_net().backward(d_v);
      policy.teacher_net().backward(dx.middleRows(kObsDim, kExtrDim));
      if (use_morph_latent) {
        policy.morph_net().backward(
            dx.bottomRows(MorphologyEncoder::kLatent));
      }
      store.at("log_std").grad.col(0) += d_log_std;

      if (cfg.desired_kl > 0.0) {
        lr = kl_adaptive_lr(lr, kl, cfg.desired_kl, cfg.lr_min, cfg.lr_max);
      }
      store.adam_step(lr, adam);

      stats.mean_kl += kl;
      stats.surrogate_loss += surr_loss;
      stats.value_loss += v_loss;
      stats.entropy += entropy;
      ++n_updates;
    }
  }

  // student adaptation: regress history latents onto current teacher
  // latents; gradient stays inside the student store
  {
    AdamConfig student_adam;
    student_adam.max_grad_norm = cfg.max_grad_norm;
    double student_loss = 0.0;
    int chunks = cfg.minibatches;
    for (int mb = 0; mb < chunks; ++mb) {
      const int begin = mb * n_total / chunks;
      const int end = (mb + 1) * n_total / chunks;
      const int n = end - begin;
      if (n == 0) continue;
      Eigen::MatrixXd hist_mb = gather(batch.hist, idx, begin, n);
      Eigen::MatrixXd priv_mb = gather(batch.priv, idx, begin, n);
      Eigen::MatrixXd target = policy.teacher_net().forward(priv_mb);
      Eigen::MatrixXd l = policy.student_net().forward_cached(hist_mb);
      Eigen::MatrixXd diff = l - target;
      student_loss += diff.squaredNorm() / (n * kExtrDim);
      Eigen::MatrixXd d_l = 2.0 * diff / (n * kExtrDim);
      policy.student_store().zero_grad();
      policy.student_net().backward(d_l);
      policy.student_store().adam_step(cfg.adaptation_lr, student_adam);
    }
    stats.student_loss = student_loss / chunks;
  }

  stats.mean_kl /= n_updates;
  stats.surrogate_loss /= n_updates;
  stats.value_loss /= n_updates;
  stats.entropy /= n_updates;
  stats.learning_rate = lr;
  return stats;
}

}  // namespace mcarl
