#pragma once

#include <Eigen/Dense>

#include "mcarl/mlp.hpp"
#include "mcarl/morphology.hpp"
#include "mcarl/sim_types.hpp"

namespace mcarl {

inline constexpr int kExtrDim = 18;       // extrinsics latent
inline constexpr int kHistorySteps = 30;  // sliding window length T
inline constexpr int kHistoryDim = kHistorySteps * (kObsDim + kNumJoints);  // 1800
inline constexpr int kActionDim = kNumJoints;
inline constexpr int kPolicyInputDim = kObsDim + kExtrDim + MorphologyEncoder::kLatent;

struct ActionDistribution {
  Eigen::VectorXd mean;     // 12
  Eigen::VectorXd log_std;  // 12, state-independent learned parameter
};

// log N(a; mean, diag(exp(log_std)^2))
double gaussian_log_prob(const ActionDistribution& dist,
                         const Eigen::VectorXd& a);
// sum_i (0.5 ln(2*pi*e) + log_std_i)
double gaussian_entropy(const Eigen::VectorXd& log_std);

// Oldest-first sliding window of (observation, action) pairs, zero-padded
// at episode start.
class HistoryWindow {
 public:
  HistoryWindow() : buf_(Eigen::VectorXd::Zero(kHistoryDim)) {}

  void clear() { buf_.setZero(); }
  void push(const Eigen::VectorXd& obs, const Action12& action);
  const Eigen::VectorXd& flat() const { return buf_; }

 private:
  Eigen::VectorXd buf_;
};

// The assembled actor-critic: morphology encoder, teacher (privileged)
// encoder, student (history) adaptation module, actor and critic heads,
// and the learned action log-std. The main store holds everything the PPO
// objective optimizes; the student lives in its own store so its
// regression never leaks gradient into the teacher.
class McarlPolicy {
 public:
  McarlPolicy();

  void init(Rng& rng, double initial_log_std = 0.0);

  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }
  ParamStore& student_store() { return student_store_; }
  const ParamStore& student_store() const { return student_store_; }

  // batched forwards; columns are samples
  Eigen::MatrixXd encode_morphology(const Eigen::MatrixXd& m) const {
    return morph_enc_.encode(m);
  }
  Eigen::MatrixXd encode_extrinsics_teacher(const Eigen::MatrixXd& priv) const {
    return teacher_.forward(priv);
  }
  Eigen::MatrixXd encode_extrinsics_student(const Eigen::MatrixXd& hist) const {
    return student_.forward(hist);
  }
  Eigen::MatrixXd actor_mean(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd critic_value(const Eigen::MatrixXd& x) const;

  // concatenation [obs; extrinsics; z_m], each column one sample
  static Eigen::MatrixXd assemble_input(const Eigen::MatrixXd& obs,
                                        const Eigen::MatrixXd& extr,
                                        const Eigen::MatrixXd& z_m);

  ActionDistribution action_distribution(const Eigen::VectorXd& x) const;

  const Eigen::VectorXd log_std() const {
    return store_.at("log_std").value.col(0);
  }

  Mlp& morph_net() { return morph_enc_.net(); }
  Mlp& teacher_net() { return teacher_; }
  Mlp& student_net() { return student_; }
  Mlp& actor_net() { return actor_; }
  Mlp& critic_net() { return critic_; }

 private:
  ParamStore store_;
  ParamStore student_store_;
  MorphologyEncoder morph_enc_;
  Mlp teacher_;  // 18 -> [256, 128] -> 18
  Mlp student_;  // 1800 -> [256, 32] -> 18
  Mlp actor_;    // 130 -> [512, 256, 128] -> 12
  Mlp critic_;   // 130 -> [512, 256, 128] -> 1
};

}  // namespace mcarl
