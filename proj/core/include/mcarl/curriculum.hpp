#pragma once

#include <Eigen/Dense>

#include <array>
#include <deque>
#include <vector>

#include "mcarl/lstm.hpp"
#include "mcarl/rng.hpp"
#include "mcarl/sim_types.hpp"

namespace mcarl {

// discretized command space (v_x, v_y, w_z), row-major index over cells
struct BinGrid {
  std::array<int, 3> counts = {20, 10, 20};
  std::array<double, 3> lo = {-6.0, -1.0, -5.0};
  std::array<double, 3> hi = {6.0, 1.0, 5.0};

  int total() const { return counts[0] * counts[1] * counts[2]; }
  std::array<double, 3> cell_size() const {
    return {(hi[0] - lo[0]) / counts[0], (hi[1] - lo[1]) / counts[1],
            (hi[2] - lo[2]) / counts[2]};
  }

  // out-of-range commands clamp to the boundary bin
  int index(const Command& cmd, bool* clamped = nullptr) const;
  Command center(int bin) const;
  void cell_bounds(int bin, Command* lo_out, Command* hi_out) const;
  std::array<int, 3> coords(int bin) const;
  int from_coords(int ix, int iy, int iz) const;
};

struct CurriculumRecord {
  int bin = 0;
  double r_lin = 0.0;  // observed weighted linear tracking reward
  double r_ang = 0.0;
};

struct HaclConfig {
  int hidden_size = 128;
  double learning_rate = 1e-3;
  int tbptt_length = 32;
  double weight_alpha = 0.2;
  bool average_pair = true;  // 0.2 * (r_lin + r_ang) / 2 vs alpha * (sum)
  double initial_vx = 1.0;   // initial unlocked |v_x| range
  double initial_wz = 1.0;
  double expand_threshold = 0.8;  // fraction of max attainable tracking reward
  double max_tracking = 6.0;      // r_lin + r_ang at perfect tracking
  double seed_weight = 0.1;
  int max_replay = 100000;
};

// History-Aware Curriculum Learning: an LSTM fed one-hot bin ids predicts
// per-bin (linear, angular) tracking rewards; bin weights move toward bins
// with high predicted reward and commands are sampled from the weights.
class HaclCurriculum {
 public:
  HaclCurriculum(const BinGrid& grid, const HaclConfig& cfg, Rng& init_rng);

  const BinGrid& grid() const { return grid_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<uint8_t>& active() const { return active_; }
  int active_count() const;

  bool is_active(int bin) const { return active_[bin] != 0; }

  // record an observed episode outcome (consumed by the next training pass)
  void observe(const CurriculumRecord& rec);

  // (r_hat_lin, r_hat_ang) via one recorded LSTM step; advances the
  // hidden state (the recurrence is live)
  std::pair<double, double> predict(int bin);
  // query from the current hidden state without advancing it
  std::pair<double, double> predict_frozen(int bin) const;

  // MSE training over pending records in visit order, truncated BPTT;
  // returns mean loss (0 when nothing pending)
  double train_predictor();

  // w <- max(0, w + alpha * f(r_hat_lin + r_hat_ang)) over active bins,
  // using frozen-state predictions; resets to uniform if all weights hit 0
  void update_weights();

  // unlock adjacent bins when boundary bins track well enough
  void maybe_expand_frontier();

  Command sample_command(Rng& rng) const;

  // direct access for tests / serialization
  ParamStore& predictor_store() { return store_; }
  const ParamStore& predictor_store() const { return store_; }
  LstmState& hidden_state() { return state_; }
  const LstmState& hidden_state() const { return state_; }
  Eigen::VectorXd& mutable_weights() { return weights_; }
  std::vector<uint8_t>& mutable_active() { return active_; }
  std::array<int, 6>& frontier() { return frontier_; }
  const std::array<int, 6>& frontier() const { return frontier_; }
  std::deque<CurriculumRecord>& pending() { return pending_; }
  const HaclConfig& config() const { return cfg_; }
  void rebuild_active_from_frontier();

  // mean observed tracking reward per bin since the last expansion check
  const Eigen::VectorXd& observed_sum() const { return observed_sum_; }
  const Eigen::VectorXd& observed_count() const { return observed_count_; }
  Eigen::VectorXd& mutable_observed_sum() { return observed_sum_; }
  Eigen::VectorXd& mutable_observed_count() { return observed_count_; }

 private:
  std::pair<double, double> readout(const Eigen::VectorXd& hidden,
                                    int bin) const;

  BinGrid grid_;
  HaclConfig cfg_;
  ParamStore store_;
  LstmCell cell_;
  Param* readout_w_ = nullptr;  // (2 * bins) x hidden
  Param* readout_b_ = nullptr;  // (2 * bins) x 1
  LstmState state_;
  Eigen::VectorXd weights_;
  std::vector<uint8_t> active_;
  std::array<int, 6> frontier_{};  // [lo_x, hi_x, lo_y, hi_y, lo_z, hi_z]
  std::deque<CurriculumRecord> pending_;
  Eigen::VectorXd observed_sum_;
  Eigen::VectorXd observed_count_;
};

// Non-history baseline: fixed-rule box expansion over the same grid,
// uniform sampling within the unlocked box.
class FixedRuleCurriculum {
 public:
  FixedRuleCurriculum(const BinGrid& grid, const HaclConfig& cfg);

  void observe(const CurriculumRecord& rec);
  void update();  // expand when recent mean tracking reward clears threshold
  Command sample_command(Rng& rng) const;

  const std::array<int, 6>& frontier() const { return frontier_; }
  std::array<int, 6>& mutable_frontier() { return frontier_; }
  double recent_mean() const;
  double recent_sum() const { return recent_sum_; }
  double recent_count() const { return recent_count_; }
  double& mutable_recent_sum() { return recent_sum_; }
  double& mutable_recent_count() { return recent_count_; }

 private:
  BinGrid grid_;
  HaclConfig cfg_;
  std::array<int, 6> frontier_{};
  double recent_sum_ = 0.0;
  double recent_count_ = 0.0;
};

}  // namespace mcarl
