#pragma once

#include <Eigen/Dense>

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcarl/rng.hpp"

namespace mcarl {

struct Param {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  Eigen::MatrixXd adam_m;
  Eigen::MatrixXd adam_v;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double max_grad_norm = 1.0;  // global L2 clip; <= 0 disables
};

// Named parameter arrays with matching gradient accumulators and Adam
// moment buffers. One store is exclusively owned by one trainer; rollout
// workers only ever read values.
class ParamStore {
 public:
  // adds a zero-initialized parameter; name must be unique
  Param& add(const std::string& name, int rows, int cols);

  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  // in registration order (stable, used for serialization and clipping)
  const std::deque<Param>& params() const { return params_; }
  std::deque<Param>& params() { return params_; }

  int64_t total_size() const;
  int64_t step_count() const { return step_; }
  void set_step_count(int64_t s) { step_ = s; }

  void zero_grad();
  double grad_norm() const;

  // bias-corrected Adam over all parameters; clips the global gradient
  // norm first, zeroes gradients afterwards. Throws on non-finite
  // gradients, naming the offending parameter.
  void adam_step(double lr, const AdamConfig& cfg = {});

  void copy_values_from(const ParamStore& other);

  // flatten / unflatten values only (finite-difference checks)
  Eigen::VectorXd flatten_values() const;
  void unflatten_values(const Eigen::VectorXd& flat);
  Eigen::VectorXd flatten_grads() const;

 private:
  std::deque<Param> params_;
  std::unordered_map<std::string, Param*> index_;
  int64_t step_ = 0;
};

}  // namespace mcarl
