#include "mcarl/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

namespace {
inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}
}  // namespace

LstmCell::LstmCell(ParamStore& store, std::string prefix, int input_size,
                   int hidden_size)
    : store_(&store),
      prefix_(std::move(prefix)),
      input_size_(input_size),
      hidden_size_(hidden_size) {
  wx_ = &store_->add(prefix_ + ".Wx", 4 * hidden_size_, input_size_);
  wh_ = &store_->add(prefix_ + ".Wh", 4 * hidden_size_, hidden_size_);
  bias_ = &store_->add(prefix_ + ".b", 4 * hidden_size_, 1);
}

void LstmCell::init_uniform(Rng& rng, double scale) {
  const double bound =
      scale / std::sqrt(static_cast<double>(hidden_size_));
  for (Param* p : {wx_, wh_, bias_}) {
    auto& m = p->value;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = rng.uniform(-bound, bound);
      }
    }
  }
}

LstmState LstmCell::step_impl(const LstmState& state, const Eigen::VectorXd* x,
                              int onehot, StepCache* cache) const {
  if (state.hidden.size() != hidden_size_ || state.cell.size() != hidden_size_) {
    throw std::invalid_argument(prefix_ + ": state size mismatch");
  }
  Eigen::VectorXd z;
  if (onehot >= 0) {
    if (onehot >= input_size_) {
      throw std::invalid_argument(prefix_ + ": one-hot index out of range");
    }
    z = wx_->value.col(onehot);
  } else {
    if (x->size() != input_size_) {
      throw std::invalid_argument(prefix_ + ": input size mismatch");
    }
    z.noalias() = wx_->value * (*x);
  }
  z.noalias() += wh_->value * state.hidden;
  z += bias_->value.col(0);

  const int H = hidden_size_;
  Eigen::ArrayXd gi = sigmoid(z.segment(0, H).array());
  Eigen::ArrayXd gf = sigmoid(z.segment(H, H).array());
  Eigen::ArrayXd gg = z.segment(2 * H, H).array().tanh();
  Eigen::ArrayXd go = sigmoid(z.segment(3 * H, H).array());

  LstmState next;
  next.cell = (gf * state.cell.array() + gi * gg).matrix();
  Eigen::ArrayXd tanh_c = next.cell.array().tanh();
  next.hidden = (go * tanh_c).matrix();

  if (cache) {
    cache->onehot = onehot;
    if (onehot < 0) cache->x = *x;
    cache->h_prev = state.hidden;
    cache->c_prev = state.cell;
    cache->gi = gi.matrix();
    cache->gf = gf.matrix();
    cache->gg = gg.matrix();
    cache->go = go.matrix();
    cache->c = next.cell;
    cache->tanh_c = tanh_c.matrix();
  }
  return next;
}

LstmState LstmCell::step(const LstmState& state,
                         const Eigen::VectorXd& x) const {
  return step_impl(state, &x, -1, nullptr);
}

LstmState LstmCell::step_onehot(const LstmState& state, int index) const {
  return step_impl(state, nullptr, index, nullptr);
}

void LstmCell::begin_sequence(const LstmState& initial) {
  state_ = initial;
  steps_.clear();
}

const LstmState& LstmCell::record_step(const Eigen::VectorXd& x) {
  steps_.emplace_back();
  state_ = step_impl(state_, &x, -1, &steps_.back());
  return state_;
}

const LstmState& LstmCell::record_step_onehot(int index) {
  steps_.emplace_back();
  state_ = step_impl(state_, nullptr, index, &steps_.back());
  return state_;
}

void LstmCell::backward(const std::vector<Eigen::VectorXd>& upstream_hidden) {
  if (upstream_hidden.size() != steps_.size()) {
    throw std::invalid_argument(prefix_ + ": upstream count mismatch");
  }
  const int H = hidden_size_;
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dz(4 * H);
  for (int t = static_cast<int>(steps_.size()) - 1; t >= 0; --t) {
    const StepCache& s = steps_[t];
    Eigen::ArrayXd dh = dh_next.array() + upstream_hidden[t].array();
    Eigen::ArrayXd dc = dc_next.array() +
                        dh * s.go.array() *
                            (1.0 - s.tanh_c.array() * s.tanh_c.array());
    Eigen::ArrayXd di = dc * s.gg.array();
    Eigen::ArrayXd df = dc * s.c_prev.array();
    Eigen::ArrayXd dg = dc * s.gi.array();
    Eigen::ArrayXd do_ = dh * s.tanh_c.array();
    dz.segment(0, H) = (di * s.gi.array() * (1.0 - s.gi.array())).matrix();
    dz.segment(H, H) = (df * s.gf.array() * (1.0 - s.gf.array())).matrix();
    dz.segment(2 * H, H) =
        (dg * (1.0 - s.gg.array() * s.gg.array())).matrix();
    dz.segment(3 * H, H) =
        (do_ * s.go.array() * (1.0 - s.go.array())).matrix();

    if (s.onehot >= 0) {
      wx_->grad.col(s.onehot) += dz;
    } else {
      wx_->grad.noalias() += dz * s.x.transpose();
    }
    wh_->grad.noalias() += dz * s.h_prev.transpose();
    bias_->grad.col(0) += dz;

    dh_next.noalias() = wh_->value.transpose() * dz;
    dc_next = (dc * s.gf.array()).matrix();
  }
  steps_.clear();
}

}  // namespace mcarl
