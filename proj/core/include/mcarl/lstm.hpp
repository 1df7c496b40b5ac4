#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mcarl/param_store.hpp"

namespace mcarl {

struct LstmState {
  Eigen::VectorXd hidden;
  Eigen::VectorXd cell;

  static LstmState zero(int hidden_size) {
    return {Eigen::VectorXd::Zero(hidden_size),
            Eigen::VectorXd::Zero(hidden_size)};
  }
};

// Single LSTM cell (input/forget/output gates with sigmoid, candidate with
// tanh). Gate rows are stacked [i; f; g; o]. Supports a sparse one-hot
// input path where W_x * x reduces to a column slice; only that column
// receives gradient.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(ParamStore& store, std::string prefix, int input_size,
           int hidden_size);

  void init_uniform(Rng& rng, double scale = 1.0);

  int input_size() const { return input_size_; }
  int hidden_size() const { return hidden_size_; }

  // stateless single step
  LstmState step(const LstmState& state, const Eigen::VectorXd& x) const;
  LstmState step_onehot(const LstmState& state, int index) const;

  // -- recorded sequence API (truncated BPTT) -- //
  void begin_sequence(const LstmState& initial);
  // advance the recorded state by one step, caching everything backward
  // needs; returns the state after the step
  const LstmState& record_step(const Eigen::VectorXd& x);
  const LstmState& record_step_onehot(int index);
  int recorded_steps() const { return static_cast<int>(steps_.size()); }
  const LstmState& current_state() const { return state_; }

  // reverse pass over the recorded sequence. upstream_hidden[t] is
  // d(loss)/d(hidden_t) after step t (may be zero for unused steps).
  // Accumulates parameter gradients and clears the recording.
  void backward(const std::vector<Eigen::VectorXd>& upstream_hidden);

 private:
  struct StepCache {
    int onehot = -1;                // >= 0 when the input was one-hot
    Eigen::VectorXd x;              // dense input (empty when one-hot)
    Eigen::VectorXd h_prev, c_prev;
    Eigen::VectorXd gi, gf, gg, go;  // post-nonlinearity gate values
    Eigen::VectorXd c, tanh_c;
  };

  LstmState step_impl(const LstmState& state, const Eigen::VectorXd* x,
                      int onehot, StepCache* cache) const;

  ParamStore* store_ = nullptr;
  std::string prefix_;
  int input_size_ = 0;
  int hidden_size_ = 0;
  Param* wx_ = nullptr;
  Param* wh_ = nullptr;
  Param* bias_ = nullptr;

  LstmState state_;
  std::vector<StepCache> steps_;
};

}  // namespace mcarl
