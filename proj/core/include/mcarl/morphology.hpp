#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>

#include "mcarl/mlp.hpp"
#include "mcarl/rng.hpp"

namespace mcarl {

inline constexpr int kMorphDim = 14;

// canonical component order of the morphology/control vector
enum MorphIndex : int {
  kHipToThighLen = 0,
  kThighToCalfLen = 1,
  kCalfToFootLen = 2,
  kThighMass = 3,
  kCalfMass = 4,
  kHipMass = 5,
  kFootMass = 6,
  kBaseMass = 7,
  kJointStiffness = 8,
  kJointDamping = 9,
  kActionScale = 10,
  kMotorStrength = 11,
  kHipTorqueLimit = 12,
  kCalfTorqueLimit = 13,
};

// index range of the control entries within the canonical order
inline constexpr int kCtrlBegin = kJointStiffness;

using Morph14 = Eigen::Matrix<double, kMorphDim, 1>;

// Per-parameter sampling bounds. Lengths in meters, masses in kilograms,
// stiffness Nm/rad, damping Nms/rad, torque limits Nm; scales and motor
// strength dimensionless.
struct MorphologyRange {
  struct Entry {
    std::string name;
    double min = 0.0;
    double max = 0.0;
  };
  std::array<Entry, kMorphDim> entries;

  static MorphologyRange defaults();
  void validate() const;  // throws std::invalid_argument

  Morph14 midpoint() const;
  bool contains(const Morph14& m) const;
};

struct MorphologyVector {
  Morph14 values;

  MorphologyVector() { values.setZero(); }
  explicit MorphologyVector(const Morph14& v) : values(v) {}

  double operator[](int k) const { return values(k); }
  double& operator[](int k) { return values(k); }
};

// each component drawn independently and uniformly from [min_k, max_k]
MorphologyVector sample_morphology(const MorphologyRange& range, Rng& rng);

// Two-layer ELU encoder 14 -> 128 -> 64 producing the morphology latent.
class MorphologyEncoder {
 public:
  static constexpr int kHidden = 128;
  static constexpr int kLatent = 64;

  explicit MorphologyEncoder(ParamStore& store,
                             const std::string& prefix = "morph_enc");

  void init(Rng& rng) { net_.init_uniform(rng); }

  Eigen::VectorXd encode(const MorphologyVector& m) const {
    return net_.forward(m.values);
  }
  // batched: columns are morphology vectors
  Eigen::MatrixXd encode(const Eigen::MatrixXd& m) const {
    return net_.forward(m);
  }

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

// weights and population statistics for the normalized weighted distance
struct DistanceWeights {
  Morph14 w;
  Morph14 mu;
  Morph14 sigma;

  // w_k = 1, mu_k = range midpoint, sigma_k = width / sqrt(12)
  static DistanceWeights from_range(const MorphologyRange& range);
  void validate() const;
};

// sqrt(sum_k w_k ((a_k - mu_k)/sigma_k - (b_k - mu_k)/sigma_k)^2)
double morphology_distance(const MorphologyVector& a,
                           const MorphologyVector& b,
                           const DistanceWeights& dw);

}  // namespace mcarl
