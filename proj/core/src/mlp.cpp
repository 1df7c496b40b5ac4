#include "mcarl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

Mlp::Mlp(ParamStore& store, std::string prefix, std::vector<int> dims,
         bool output_activation)
    : store_(&store),
      prefix_(std::move(prefix)),
      dims_(std::move(dims)),
      output_activation_(output_activation) {
  if (dims_.size() < 2) throw std::invalid_argument("mlp needs >= 2 dims");
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    const std::string tag = std::to_string(l);
    weights_.push_back(
        &store_->add(prefix_ + ".W" + tag, dims_[l + 1], dims_[l]));
    biases_.push_back(&store_->add(prefix_ + ".b" + tag, dims_[l + 1], 1));
  }
}

void Mlp::init_uniform(Rng& rng, double scale) {
  for (size_t l = 0; l < weights_.size(); ++l) {
    const double bound = scale / std::sqrt(static_cast<double>(dims_[l]));
    auto& W = weights_[l]->value;
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        W(i, j) = rng.uniform(-bound, bound);
      }
    }
    auto& b = biases_[l]->value;
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      b(i, 0) = rng.uniform(-bound, bound);
    }
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != dims_.front()) {
    throw std::invalid_argument(prefix_ + ": input dim " +
                                std::to_string(x.rows()) + ", expected " +
                                std::to_string(dims_.front()));
  }
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l]->value * a;
    z.colwise() += Eigen::VectorXd(biases_[l]->value.col(0));
    const bool act = (l + 1 < weights_.size()) || output_activation_;
    a = act ? Eigen::MatrixXd(elu(z.array())) : std::move(z);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward_cached(const Eigen::MatrixXd& x) {
  if (x.rows() != dims_.front()) {
    throw std::invalid_argument(prefix_ + ": input dim " +
                                std::to_string(x.rows()) + ", expected " +
                                std::to_string(dims_.front()));
  }
  inputs_.assign(weights_.size(), {});
  preacts_.assign(weights_.size(), {});
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    inputs_[l] = a;
    Eigen::MatrixXd z = weights_[l]->value * a;
    z.colwise() += Eigen::VectorXd(biases_[l]->value.col(0));
    preacts_[l] = z;
    const bool act = (l + 1 < weights_.size()) || output_activation_;
    a = act ? Eigen::MatrixXd(elu(z.array())) : std::move(z);
  }
  has_cache_ = true;
  return a;
}

Eigen::MatrixXd Mlp::backward(const Eigen::MatrixXd& upstream) {
  if (!has_cache_) {
    throw std::logic_error(prefix_ + ": backward without recorded forward");
  }
  Eigen::MatrixXd delta = upstream;
  for (size_t li = weights_.size(); li-- > 0;) {
    const bool act = (li + 1 < weights_.size()) || output_activation_;
    if (act) {
      delta.array() *= elu_grad(preacts_[li].array());
    }
    weights_[li]->grad.noalias() += delta * inputs_[li].transpose();
    biases_[li]->grad.col(0) += delta.rowwise().sum();
    if (li > 0) {
      delta = weights_[li]->value.transpose() * delta;
    } else {
      delta = weights_[li]->value.transpose() * delta;
      return delta;
    }
  }
  return {};
}

}  // namespace mcarl
