#include "mcarl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcarl {

int BinGrid::index(const Command& cmd, bool* clamped) const {
  const auto cs = cell_size();
  const double vals[3] = {cmd.vx, cmd.vy, cmd.wz};
  int ix[3];
  bool was_clamped = false;
  for (int a = 0; a < 3; ++a) {
    int i = static_cast<int>(std::floor((vals[a] - lo[a]) / cs[a]));
    if (i < 0 || i >= counts[a]) was_clamped = true;
    ix[a] = std::clamp(i, 0, counts[a] - 1);
  }
  if (clamped) *clamped = was_clamped;
  return from_coords(ix[0], ix[1], ix[2]);
}

Command BinGrid::center(int bin) const {
  const auto c = coords(bin);
  const auto cs = cell_size();
  Command cmd;
  cmd.vx = lo[0] + (c[0] + 0.5) * cs[0];
  cmd.vy = lo[1] + (c[1] + 0.5) * cs[1];
  cmd.wz = lo[2] + (c[2] + 0.5) * cs[2];
  return cmd;
}

void BinGrid::cell_bounds(int bin, Command* lo_out, Command* hi_out) const {
  const auto c = coords(bin);
  const auto cs = cell_size();
  lo_out->vx = lo[0] + c[0] * cs[0];
  lo_out->vy = lo[1] + c[1] * cs[1];
  lo_out->wz = lo[2] + c[2] * cs[2];
  hi_out->vx = lo_out->vx + cs[0];
  hi_out->vy = lo_out->vy + cs[1];
  hi_out->wz = lo_out->wz + cs[2];
}

std::array<int, 3> BinGrid::coords(int bin) const {
  const int iz = bin % counts[2];
  const int iy = (bin / counts[2]) % counts[1];
  const int ix = bin / (counts[2] * counts[1]);
  return {ix, iy, iz};
}

int BinGrid::from_coords(int ix, int iy, int iz) const {
  return (ix * counts[1] + iy) * counts[2] + iz;
}

HaclCurriculum::HaclCurriculum(const BinGrid& grid, const HaclConfig& cfg,
                               Rng& init_rng)
    : grid_(grid), cfg_(cfg), cell_(store_, "lstm", grid.total(),
                                    cfg.hidden_size) {
  readout_w_ = &store_.add("readout.W", 2 * grid_.total(), cfg_.hidden_size);
  readout_b_ = &store_.add("readout.b", 2 * grid_.total(), 1);
  cell_.init_uniform(init_rng);
  // readout stays zero so a fresh predictor outputs 0 for every bin
  state_ = LstmState::zero(cfg_.hidden_size);

  // initial frontier: bins whose centers lie inside the initial ranges
  const auto cs = grid_.cell_size();
  auto axis_range = [&](int axis, double half_range) {
    int lo_i = grid_.counts[axis] - 1, hi_i = 0;
    for (int i = 0; i < grid_.counts[axis]; ++i) {
      const double center = grid_.lo[axis] + (i + 0.5) * cs[axis];
      if (std::abs(center) <= half_range + 1e-12) {
        lo_i = std::min(lo_i, i);
        hi_i = std::max(hi_i, i);
      }
    }
    if (lo_i > hi_i) {  // no center inside: fall back to the middle cells
      lo_i = (grid_.counts[axis] - 1) / 2;
      hi_i = grid_.counts[axis] / 2;
    }
    return std::pair<int, int>(lo_i, hi_i);
  };
  auto [lx, hx] = axis_range(0, cfg_.initial_vx);
  auto [lz, hz] = axis_range(2, cfg_.initial_wz);
  frontier_ = {lx, hx, 0, grid_.counts[1] - 1, lz, hz};

  weights_ = Eigen::VectorXd::Zero(grid_.total());
  active_.assign(grid_.total(), 0);
  rebuild_active_from_frontier();
  observed_sum_ = Eigen::VectorXd::Zero(grid_.total());
  observed_count_ = Eigen::VectorXd::Zero(grid_.total());
}

void HaclCurriculum::rebuild_active_from_frontier() {
  for (int b = 0; b < grid_.total(); ++b) {
    const auto c = grid_.coords(b);
    const bool in = c[0] >= frontier_[0] && c[0] <= frontier_[1] &&
                    c[1] >= frontier_[2] && c[1] <= frontier_[3] &&
                    c[2] >= frontier_[4] && c[2] <= frontier_[5];
    if (in) {
      active_[b] = 1;
      if (weights_(b) == 0.0) weights_(b) = 1.0;
    } else {
      active_[b] = 0;
      weights_(b) = 0.0;
    }
  }
}

int HaclCurriculum::active_count() const {
  int n = 0;
  for (auto a : active_) n += a;
  return n;
}

void HaclCurriculum::observe(const CurriculumRecord& rec) {
  if (rec.bin < 0 || rec.bin >= grid_.total()) {
    throw std::out_of_range("curriculum record bin out of range");
  }
  pending_.push_back(rec);
  while (static_cast<int>(pending_.size()) > cfg_.max_replay) {
    pending_.pop_front();
  }
  observed_sum_(rec.bin) += rec.r_lin + rec.r_ang;
  observed_count_(rec.bin) += 1.0;
}

std::pair<double, double> HaclCurriculum::readout(
    const Eigen::VectorXd& hidden, int bin) const {
  const double lin =
      readout_w_->value.row(2 * bin).dot(hidden) + readout_b_->value(2 * bin, 0);
  const double ang = readout_w_->value.row(2 * bin + 1).dot(hidden) +
                     readout_b_->value(2 * bin + 1, 0);
  return {lin, ang};
}

std::pair<double, double> HaclCurriculum::predict(int bin) {
  state_ = cell_.step_onehot(state_, bin);
  return readout(state_.hidden, bin);
}

std::pair<double, double> HaclCurriculum::predict_frozen(int bin) const {
  const LstmState next = cell_.step_onehot(state_, bin);
  return readout(next.hidden, bin);
}

double HaclCurriculum::train_predictor() {
  if (pending_.empty()) return 0.0;
  double total_loss = 0.0;
  int total_records = 0;
  while (!pending_.empty()) {
    const int n = std::min<int>(cfg_.tbptt_length,
                                static_cast<int>(pending_.size()));
    cell_.begin_sequence(state_);
    std::vector<Eigen::VectorXd> upstream;
    upstream.reserve(n);
    store_.zero_grad();
    for (int t = 0; t < n; ++t) {
      const CurriculumRecord rec = pending_.front();
      pending_.pop_front();
      const LstmState& st = cell_.record_step_onehot(rec.bin);
      auto [pl, pa] = readout(st.hidden, rec.bin);
      const double dl = pl - rec.r_lin;
      const double da = pa - rec.r_ang;
      total_loss += 0.5 * (dl * dl + da * da);
      const double scale = 1.0 / n;
      // loss gradient through the two touched readout rows only
      readout_w_->grad.row(2 * rec.bin) +=
          scale * dl * st.hidden.transpose();
      readout_w_->grad.row(2 * rec.bin + 1) +=
          scale * da * st.hidden.transpose();
      readout_b_->grad(2 * rec.bin, 0) += scale * dl;
      readout_b_->grad(2 * rec.bin + 1, 0) += scale * da;
      Eigen::VectorXd dh =
          scale * (dl * readout_w_->value.row(2 * rec.bin).transpose() +
                   da * readout_w_->value.row(2 * rec.bin + 1).transpose());
      upstream.push_back(std::move(dh));
    }
    state_ = cell_.current_state();
    cell_.backward(upstream);
    store_.adam_step(cfg_.learning_rate);
    total_records += n;
  }
  return total_loss / std::max(1, total_records);
}

void HaclCurriculum::update_weights() {
  for (int b = 0; b < grid_.total(); ++b) {
    if (!active_[b]) continue;
    auto [pl, pa] = predict_frozen(b);
    const double pair_sum = pl + pa;
    const double delta = cfg_.weight_alpha *
                         (cfg_.average_pair ? 0.5 * pair_sum : pair_sum);
    weights_(b) = std::max(0.0, weights_(b) + delta);
  }
  double total = 0.0;
  for (int b = 0; b < grid_.total(); ++b) {
    if (active_[b]) total += weights_(b);
  }
  if (total <= 0.0) {
    for (int b = 0; b < grid_.total(); ++b) {
      if (active_[b]) weights_(b) = 1.0;
    }
  }
}

void HaclCurriculum::maybe_expand_frontier() {
  // boundary = active bins touching the frontier surface on x or z
  double sum = 0.0, count = 0.0;
  for (int b = 0; b < grid_.total(); ++b) {
    if (!active_[b]) continue;
    const auto c = grid_.coords(b);
    const bool boundary = c[0] == frontier_[0] || c[0] == frontier_[1] ||
                          c[2] == frontier_[4] || c[2] == frontier_[5];
    if (!boundary) continue;
    sum += observed_sum_(b);
    count += observed_count_(b);
  }
  if (count <= 0.0) return;
  if (sum / count < cfg_.expand_threshold * cfg_.max_tracking) return;

  const std::array<int, 6> old = frontier_;
  frontier_[0] = std::max(0, frontier_[0] - 1);
  frontier_[1] = std::min(grid_.counts[0] - 1, frontier_[1] + 1);
  frontier_[4] = std::max(0, frontier_[4] - 1);
  frontier_[5] = std::min(grid_.counts[2] - 1, frontier_[5] + 1);
  if (frontier_ == old) return;
  for (int b = 0; b < grid_.total(); ++b) {
    if (active_[b]) continue;
    const auto c = grid_.coords(b);
    const bool in = c[0] >= frontier_[0] && c[0] <= frontier_[1] &&
                    c[1] >= frontier_[2] && c[1] <= frontier_[3] &&
                    c[2] >= frontier_[4] && c[2] <= frontier_[5];
    if (in) {
      active_[b] = 1;
      weights_(b) = cfg_.seed_weight;
    }
  }
  observed_sum_.setZero();
  observed_count_.setZero();
}

Command HaclCurriculum::sample_command(Rng& rng) const {
  double total = 0.0;
  for (int b = 0; b < grid_.total(); ++b) {
    if (active_[b]) total += weights_(b);
  }
  if (!(total > 0.0)) {
    throw std::logic_error("curriculum: no positive weights to sample from");
  }
  double u = rng.uniform01() * total;
  int chosen = -1;
  for (int b = 0; b < grid_.total(); ++b) {
    if (!active_[b]) continue;
    u -= weights_(b);
    if (u <= 0.0) {
      chosen = b;
      break;
    }
  }
  if (chosen < 0) {
    for (int b = grid_.total() - 1; b >= 0; --b) {
      if (active_[b]) {
        chosen = b;
        break;
      }
    }
  }
  Command clo, chi;
  grid_.cell_bounds(chosen, &clo, &chi);
  Command cmd;
  cmd.vx = rng.uniform(clo.vx, chi.vx);
  cmd.vy = rng.uniform(clo.vy, chi.vy);
  cmd.wz = rng.uniform(clo.wz, chi.wz);
  return cmd;
}

FixedRuleCurriculum::FixedRuleCurriculum(const BinGrid& grid,
                                         const HaclConfig& cfg)
    : grid_(grid), cfg_(cfg) {
  const auto cs = grid_.cell_size();
  auto axis_range = [&](int axis, double half_range) {
    int lo_i = grid_.counts[axis] - 1, hi_i = 0;
    for (int i = 0; i < grid_.counts[axis]; ++i) {
      const double center = grid_.lo[axis] + (i + 0.5) * cs[axis];
      if (std::abs(center) <= half_range + 1e-12) {
        lo_i = std::min(lo_i, i);
        hi_i = std::max(hi_i, i);
      }
    }
    if (lo_i > hi_i) {
      lo_i = (grid_.counts[axis] - 1) / 2;
      hi_i = grid_.counts[axis] / 2;
    }
    return std::pair<int, int>(lo_i, hi_i);
  };
  auto [lx, hx] = axis_range(0, cfg_.initial_vx);
  auto [lz, hz] = axis_range(2, cfg_.initial_wz);
  frontier_ = {lx, hx, 0, grid_.counts[1] - 1, lz, hz};
}

void FixedRuleCurriculum::observe(const CurriculumRecord& rec) {
  recent_sum_ += rec.r_lin + rec.r_ang;
  recent_count_ += 1.0;
}

double FixedRuleCurriculum::recent_mean() const {
  return recent_count_ > 0.0 ? recent_sum_ / recent_count_ : 0.0;
}

void FixedRuleCurriculum::update() {
  if (recent_count_ <= 0.0) return;
  if (recent_mean() < cfg_.expand_threshold * cfg_.max_tracking) return;
  frontier_[0] = std::max(0, frontier_[0] - 1);
  frontier_[1] = std::min(grid_.counts[0] - 1, frontier_[1] + 1);
  frontier_[4] = std::max(0, frontier_[4] - 1);
  frontier_[5] = std::min(grid_.counts[2] - 1, frontier_[5] + 1);
  recent_sum_ = 0.0;
  recent_count_ = 0.0;
}

Command FixedRuleCurriculum::sample_command(Rng& rng) const {
  Command lo_cmd, hi_cmd, tmp_lo, tmp_hi;
  grid_.cell_bounds(grid_.from_coords(frontier_[0], frontier_[2], frontier_[4]),
                    &lo_cmd, &tmp_hi);
  grid_.cell_bounds(grid_.from_coords(frontier_[1], frontier_[3], frontier_[5]),
                    &tmp_lo, &hi_cmd);
  Command cmd;
  cmd.vx = rng.uniform(lo_cmd.vx, hi_cmd.vx);
  cmd.vy = rng.uniform(lo_cmd.vy, hi_cmd.vy);
  cmd.wz = rng.uniform(lo_cmd.wz, hi_cmd.wz);
  return cmd;
}

}  // namespace mcarl
