#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mcarl/param_store.hpp"

namespace mcarl {

// elementwise ELU: x for x > 0, exp(x) - 1 otherwise
inline Eigen::ArrayXXd elu(const Eigen::ArrayXXd& x) {
  return (x > 0.0).select(x, x.exp() - 1.0);
}
inline Eigen::VectorXd elu_apply(const Eigen::VectorXd& x) {
  return elu(x.array()).matrix();
}
// derivative of ELU expressed through the pre-activation
inline Eigen::ArrayXXd elu_grad(const Eigen::ArrayXXd& pre) {
  return (pre > 0.0).select(Eigen::ArrayXXd::Ones(pre.rows(), pre.cols()),
                            pre.exp());
}

// Fully connected ELU network over columns: input (d x n) -> output (o x n).
// Parameters live in a ParamStore under "<prefix>.W<i>" / "<prefix>.b<i>".
// Hidden layers always apply ELU; the output layer is linear unless
// output_activation is set. Forward passes may record a per-call cache for
// an explicit reverse pass; backward accumulates gradients additively.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, std::string prefix, std::vector<int> dims,
      bool output_activation = false);

  // uniform [-scale/sqrt(fan_in), +scale/sqrt(fan_in)]
  void init_uniform(Rng& rng, double scale = 1.0);

  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  // stateless forward (rollout / evaluation path)
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  // forward recording intermediate activations for backward()
  Eigen::MatrixXd forward_cached(const Eigen::MatrixXd& x);

  // reverse pass for the most recent forward_cached call; upstream is
  // d(loss)/d(output), shaped (o x n). Returns d(loss)/d(input).
  Eigen::MatrixXd backward(const Eigen::MatrixXd& upstream);

 private:
  ParamStore* store_ = nullptr;
  std::string prefix_;
  std::vector<int> dims_;
  bool output_activation_ = false;
  std::vector<Param*> weights_;
  std::vector<Param*> biases_;

  // cache from forward_cached: layer inputs and pre-activations
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<Eigen::MatrixXd> preacts_;
  bool has_cache_ = false;
};

}  // namespace mcarl
