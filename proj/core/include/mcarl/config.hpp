#pragma once

#include <string>

#include "mcarl/curriculum.hpp"
#include "mcarl/env.hpp"
#include "mcarl/morphology.hpp"
#include "mcarl/ppo.hpp"
#include "mcarl/rewards.hpp"

namespace mcarl {

// Table-3-style training variants
enum class Variant : int { kP0 = 0, kP1, kP2, kP3, kP4, kP5 };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);  // accepts "P0".."P5", "p0"..

// P0, P3, P4, P5 use the history-aware curriculum; P1, P2 the fixed rule
bool variant_uses_hacl(Variant v);
// P0 feeds a zero latent to the actor/critic
bool variant_uses_morph_latent(Variant v);

// The morphology vector as the policy sees it: entries hidden by the
// variant are replaced by the range midpoint. P1 exposes the shared
// midpoint vector only; P2/P3 expose physical entries, P5 control entries,
// P4 everything.
Morph14 variant_masked_morphology(Variant v, const Morph14& m,
                                  const MorphologyRange& range);

struct RunConfig {
  EnvConfig env;
  PPOConfig ppo;
  RewardWeights rewards = RewardWeights::defaults();
  MorphologyRange range = MorphologyRange::defaults();
  HaclConfig hacl;
  BinGrid grid;

  Variant variant = Variant::kP3;
  uint64_t seed = 0;
  int num_envs = 64;
  int iterations = 300;
  int checkpoint_interval = 50;
  std::string output_dir = "runs/default";
  // fixed training morphology (preset path); empty = sample per episode
  std::string preset_path;

  void validate() const;  // throws std::invalid_argument naming the field
};

// JSON round trip; unknown keys are rejected with the offending path
std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& cfg);

// dotted-path override, e.g. "ppo.learning_rate=5e-4" or "run.seed=3";
// the value is parsed as JSON, falling back to a string
void apply_override(RunConfig& cfg, const std::string& assignment);

// named morphology vector loaded from a JSON preset file
struct RobotPreset {
  std::string name;
  MorphologyVector morphology;
};

RobotPreset load_preset(const std::string& path);
void save_preset(const std::string& path, const RobotPreset& preset);

}  // namespace mcarl
