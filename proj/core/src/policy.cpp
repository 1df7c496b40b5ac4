#include "mcarl/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // 0.5 * ln(2*pi)
}

double gaussian_log_prob(const ActionDistribution& dist,
                         const Eigen::VectorXd& a) {
  if (a.size() != dist.mean.size()) {
    throw std::invalid_argument("log_prob: dimension mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double std = std::exp(dist.log_std(i));
    const double z = (a(i) - dist.mean(i)) / std;
    lp += -0.5 * z * z - dist.log_std(i) - kLogSqrt2Pi;
  }
  return lp;
}

double gaussian_entropy(const Eigen::VectorXd& log_std) {
  return log_std.sum() +
         log_std.size() * (0.5 * std::log(2.0 * M_PI * std::exp(1.0)));
}

void HistoryWindow::push(const Eigen::VectorXd& obs, const Action12& action) {
  constexpr int kStep = kObsDim + kNumJoints;
  if (obs.size() != kObsDim) throw std::invalid_argument("history: obs must be 48");
  // shift one step toward the front (oldest-first ordering)
  buf_.head(kHistoryDim - kStep) = buf_.tail(kHistoryDim - kStep).eval();
  buf_.segment(kHistoryDim - kStep, kObsDim) = obs;
  buf_.tail(kNumJoints) = action;
}

McarlPolicy::McarlPolicy()
    : morph_enc_(store_, "morph_enc"),
      teacher_(store_, "teacher", {kPrivDim, 256, 128, kExtrDim}),
      student_(student_store_, "student", {kHistoryDim, 256, 32, kExtrDim}),
      actor_(store_, "actor", {kPolicyInputDim, 512, 256, 128, kActionDim}),
      critic_(store_, "critic", {kPolicyInputDim, 512, 256, 128, 1}) {
  store_.add("log_std", kActionDim, 1);
}

void McarlPolicy::init(Rng& rng, double initial_log_std) {
  morph_enc_.net().init_uniform(rng);
  teacher_.init_uniform(rng);
  actor_.init_uniform(rng);
  critic_.init_uniform(rng);
  student_.init_uniform(rng);
  store_.at("log_std").value.setConstant(initial_log_std);
}

Eigen::MatrixXd McarlPolicy::actor_mean(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd mu = actor_.forward(x);
  if (!mu.allFinite()) {
    throw std::runtime_error("actor produced non-finite action mean");
  }
  return mu;
}

Eigen::VectorXd McarlPolicy::critic_value(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd v = critic_.forward(x);
  if (!v.allFinite()) {
    throw std::runtime_error("critic produced non-finite value");
  }
  return v.row(0).transpose();
}

Eigen::MatrixXd McarlPolicy::assemble_input(const Eigen::MatrixXd& obs,
                                            const Eigen::MatrixXd& extr,
                                            const Eigen::MatrixXd& z_m) {
  if (obs.rows() != kObsDim || extr.rows() != kExtrDim ||
      z_m.rows() != MorphologyEncoder::kLatent) {
    throw std::invalid_argument("assemble_input: component dim mismatch");
  }
  if (obs.cols() != extr.cols() || obs.cols() != z_m.cols()) {
    throw std::invalid_argument("assemble_input: batch size mismatch");
  }
  Eigen::MatrixXd x(kPolicyInputDim, obs.cols());
  x.topRows(kObsDim) = obs;
  x.middleRows(kObsDim, kExtrDim) = extr;
  x.bottomRows(MorphologyEncoder::kLatent) = z_m;
  return x;
}

ActionDistribution McarlPolicy::action_distribution(
    const Eigen::VectorXd& x) const {
  ActionDistribution dist;
  dist.mean = actor_mean(x);
  dist.log_std = log_std();
  return dist;
}

}  // namespace mcarl
