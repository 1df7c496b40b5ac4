#include "mcarl/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

Param& ParamStore::add(const std::string& name, int rows, int cols) {
  if (index_.count(name)) {
    throw std::invalid_argument("duplicate parameter: " + name);
  }
  params_.push_back(Param{name, Eigen::MatrixXd::Zero(rows, cols),
                          Eigen::MatrixXd::Zero(rows, cols),
                          Eigen::MatrixXd::Zero(rows, cols),
                          Eigen::MatrixXd::Zero(rows, cols)});
  Param& p = params_.back();
  index_[name] = &p;
  return p;
}

Param& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter: " + name);
  return *it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter: " + name);
  return *it->second;
}

bool ParamStore::contains(const std::string& name) const {
  return index_.count(name) != 0;
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

double ParamStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) sq += p.grad.squaredNorm();
  return std::sqrt(sq);
}

void ParamStore::adam_step(double lr, const AdamConfig& cfg) {
  for (const auto& p : params_) {
    if (!p.grad.allFinite()) {
      throw std::runtime_error("non-finite gradient in parameter: " + p.name);
    }
  }
  double scale = 1.0;
  if (cfg.max_grad_norm > 0.0) {
    const double norm = grad_norm();
    if (norm > cfg.max_grad_norm) scale = cfg.max_grad_norm / norm;
  }
  step_ += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (auto& p : params_) {
    Eigen::MatrixXd g = p.grad * scale;
    p.adam_m = cfg.beta1 * p.adam_m + (1.0 - cfg.beta1) * g;
    p.adam_v = cfg.beta2 * p.adam_v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    Eigen::MatrixXd m_hat = p.adam_m / bc1;
    Eigen::MatrixXd v_hat = p.adam_v / bc2;
    p.value.array() -=
        lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
    p.grad.setZero();
  }
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (other.params_.size() != params_.size()) {
    throw std::invalid_argument("param store layout mismatch");
  }
  auto it = params_.begin();
  for (const auto& p : other.params_) {
    if (it->name != p.name || it->value.rows() != p.value.rows() ||
        it->value.cols() != p.value.cols()) {
      throw std::invalid_argument("param store layout mismatch at " + p.name);
    }
    it->value = p.value;
    ++it;
  }
}

Eigen::VectorXd ParamStore::flatten_values() const {
  Eigen::VectorXd flat(total_size());
  int64_t off = 0;
  for (const auto& p : params_) {
    flat.segment(off, p.value.size()) =
        Eigen::Map<const Eigen::VectorXd>(p.value.data(), p.value.size());
    off += p.value.size();
  }
  return flat;
}

void ParamStore::unflatten_values(const Eigen::VectorXd& flat) {
  if (flat.size() != total_size()) {
    throw std::invalid_argument("flat size mismatch");
  }
  int64_t off = 0;
  for (auto& p : params_) {
    Eigen::Map<Eigen::VectorXd>(p.value.data(), p.value.size()) =
        flat.segment(off, p.value.size());
    off += p.value.size();
  }
}

Eigen::VectorXd ParamStore::flatten_grads() const {
  Eigen::VectorXd flat(total_size());
  int64_t off = 0;
  for (const auto& p : params_) {
    flat.segment(off, p.grad.size()) =
        Eigen::Map<const Eigen::VectorXd>(p.grad.data(), p.grad.size());
    off += p.grad.size();
  }
  return flat;
}

}  // namespace mcarl
