#include "mcarl/morphology.hpp"

#include <cmath>
#include <stdexcept>

namespace mcarl {

MorphologyRange MorphologyRange::defaults() {
  MorphologyRange r;
  r.entries = {{
      {"hip_to_thigh_length", 0.0, 0.08},
      {"thigh_to_calf_length", 0.2, 0.213},
      {"calf_to_foot_length", 0.0, 0.213},
      {"thigh_mass", 0.634, 1.152},
      {"calf_mass", 0.064, 0.166},
      {"hip_mass", 0.510, 0.696},
      {"foot_mass", 0.0, 0.06},
      {"base_mass", 3.3, 6.921},
      {"joint_stiffness", 20.0, 30.0},
      {"joint_damping", 0.35, 0.55},
      {"action_scale", 0.20, 0.45},
      {"motor_strength", 0.9, 1.1},
      {"hip_torque_limit", 16.0, 34.0},
      {"calf_torque_limit", 24.0, 46.0},
  }};
  return r;
}

void MorphologyRange::validate() const {
  for (const auto& e : entries) {
    if (e.name.empty()) throw std::invalid_argument("unnamed morphology entry");
    if (!(e.min <= e.max)) {
      throw std::invalid_argument("morphology range " + e.name +
                                  ": min > max");
    }
    if (!std::isfinite(e.min) || !std::isfinite(e.max)) {
      throw std::invalid_argument("morphology range " + e.name +
                                  ": non-finite bound");
    }
  }
}

Morph14 MorphologyRange::midpoint() const {
  Morph14 m;
  for (int k = 0; k < kMorphDim; ++k) {
    m(k) = 0.5 * (entries[k].min + entries[k].max);
  }
  return m;
}

bool MorphologyRange::contains(const Morph14& m) const {
  for (int k = 0; k < kMorphDim; ++k) {
    if (!(m(k) >= entries[k].min && m(k) <= entries[k].max)) return false;
  }
  return true;
}

MorphologyVector sample_morphology(const MorphologyRange& range, Rng& rng) {
  Morph14 v;
  for (int k = 0; k < kMorphDim; ++k) {
    v(k) = rng.uniform(range.entries[k].min, range.entries[k].max);
  }
  return MorphologyVector(v);
}

MorphologyEncoder::MorphologyEncoder(ParamStore& store,
                                     const std::string& prefix)
    : net_(store, prefix, {kMorphDim, kHidden, kLatent},
           /*output_activation=*/true) {}

DistanceWeights DistanceWeights::from_range(const MorphologyRange& range) {
  DistanceWeights dw;
  for (int k = 0; k < kMorphDim; ++k) {
    dw.w(k) = 1.0;
    dw.mu(k) = 0.5 * (range.entries[k].min + range.entries[k].max);
    const double width = range.entries[k].max - range.entries[k].min;
    // uniform-distribution std dev; floor keeps degenerate ranges usable
    dw.sigma(k) = std::max(width / std::sqrt(12.0), 1e-9);
  }
  return dw;
}

void DistanceWeights::validate() const {
  for (int k = 0; k < kMorphDim; ++k) {
    if (!(w(k) > 0.0 && sigma(k) > 0.0)) {
      throw std::invalid_argument("distance weights: w and sigma must be > 0");
    }
  }
}

double morphology_distance(const MorphologyVector& a,
                           const MorphologyVector& b,
                           const DistanceWeights& dw) {
  double sum = 0.0;
  for (int k = 0; k < kMorphDim; ++k) {
    const double za = (a.values(k) - dw.mu(k)) / dw.sigma(k);
    const double zb = (b.values(k) - dw.mu(k)) / dw.sigma(k);
    sum += dw.w(k) * (za - zb) * (za - zb);
  }
  return std::sqrt(sum);
}

}  // namespace mcarl
