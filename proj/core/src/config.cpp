#include "mcarl/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace mcarl {

using nlohmann::json;

std::string variant_name(Variant v) {
  return "P" + std::to_string(static_cast<int>(v));
}

Variant parse_variant(const std::string& s) {
  if (s.size() == 2 && (s[0] == 'P' || s[0] == 'p') && s[1] >= '0' &&
      s[1] <= '5') {
    return static_cast<Variant>(s[1] - '0');
  }
  throw std::invalid_argument("unknown variant '" + s +
                              "' (expected P0..P5)");
}

bool variant_uses_hacl(Variant v) {
  return v != Variant::kP1 && v != Variant::kP2;
}

bool variant_uses_morph_latent(Variant v) { return v != Variant::kP0; }

Morph14 variant_masked_morphology(Variant v, const Morph14& m,
                                  const MorphologyRange& range) {
  const Morph14 mid = range.midpoint();
  Morph14 out = mid;
  switch (v) {
    case Variant::kP0:
    case Variant::kP1:
      break;  // shared vector only (P0's latent is zeroed anyway)
    case Variant::kP2:
    case Variant::kP3:
      out.head(kCtrlBegin) = m.head(kCtrlBegin);
      break;
    case Variant::kP4:
      out = m;
      break;
    case Variant::kP5:
      out.tail(kMorphDim - kCtrlBegin) = m.tail(kMorphDim - kCtrlBegin);
      break;
  }
  return out;
}

void RunConfig::validate() const {
  env.validate();
  ppo.validate();
  rewards.validate();
  range.validate();
  if (num_envs < 1) throw std::invalid_argument("run.num_envs must be >= 1");
  if (iterations < 1) {
    throw std::invalid_argument("run.iterations must be >= 1");
  }
  if (checkpoint_interval < 1) {
    throw std::invalid_argument("run.checkpoint_interval must be >= 1");
  }
  if (hacl.hidden_size < 1 || hacl.tbptt_length < 1) {
    throw std::invalid_argument("hacl sizes must be >= 1");
  }
  if (grid.counts[0] < 1 || grid.counts[1] < 1 || grid.counts[2] < 1) {
    throw std::invalid_argument("grid.counts must be >= 1");
  }
  for (int a = 0; a < 3; ++a) {
    if (!(grid.lo[a] < grid.hi[a])) {
      throw std::invalid_argument("grid bounds must satisfy lo < hi");
    }
  }
}

namespace {

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& section) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) ==
        allowed.end()) {
      throw std::invalid_argument("unknown config key '" + section + "." +
                                  it.key() + "'");
    }
  }
}

template <typename T>
void get(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

json env_to_json(const EnvConfig& e) {
  return json{{"dt", e.dt},
              {"episode_steps", e.episode_steps},
              {"gravity", e.gravity},
              {"gait_frequency", e.gait_frequency},
              {"h_target", e.h_target},
              {"drag_coeff", e.drag_coeff},
              {"thrust_coeff", e.thrust_coeff},
              {"lateral_coeff", e.lateral_coeff},
              {"yaw_coeff", e.yaw_coeff},
              {"yaw_drag", e.yaw_drag},
              {"height_spring", e.height_spring},
              {"tilt_spring", e.tilt_spring},
              {"height_disturb_gain", e.height_disturb_gain},
              {"tilt_disturb_gain", e.tilt_disturb_gain},
              {"saturation_deadband", e.saturation_deadband},
              {"height_fail_frac", e.height_fail_frac},
              {"tilt_threshold", e.tilt_threshold},
              {"reset_noise", e.reset_noise},
              {"push_enabled", e.push_enabled},
              {"push_interval_s", e.push_interval_s},
              {"push_magnitude", e.push_magnitude},
              {"hip_scale", e.hip_scale},
              {"thigh_torque_limit", e.thigh_torque_limit},
              {"qd_max", e.qd_max},
              {"foot_force_max", e.foot_force_max},
              {"friction_min", e.friction_min},
              {"friction_max", e.friction_max},
              {"payload_min", e.payload_min},
              {"payload_max", e.payload_max},
              {"motor_noise", e.motor_noise},
              {"contact_scale_min", e.contact_scale_min},
              {"contact_scale_max", e.contact_scale_max}};
}

void env_from_json(const json& j, EnvConfig& e) {
  check_keys(j,
             {"dt", "episode_steps", "gravity", "gait_frequency", "h_target",
              "drag_coeff", "thrust_coeff", "lateral_coeff", "yaw_coeff",
              "yaw_drag", "height_spring", "tilt_spring",
              "height_disturb_gain", "tilt_disturb_gain",
              "saturation_deadband", "height_fail_frac", "tilt_threshold",
              "reset_noise", "push_enabled", "push_interval_s",
              "push_magnitude", "hip_scale", "thigh_torque_limit", "qd_max",
              "foot_force_max", "friction_min", "friction_max", "payload_min",
              "payload_max", "motor_noise", "contact_scale_min",
              "contact_scale_max"},
             "env");
  get(j, "dt", e.dt);
  get(j, "episode_steps", e.episode_steps);
  get(j, "gravity", e.gravity);
  get(j, "gait_frequency", e.gait_frequency);
  get(j, "h_target", e.h_target);
  get(j, "drag_coeff", e.drag_coeff);
  get(j, "thrust_coeff", e.thrust_coeff);
  get(j, "lateral_coeff", e.lateral_coeff);
  get(j, "yaw_coeff", e.yaw_coeff);
  get(j, "yaw_drag", e.yaw_drag);
  get(j, "height_spring", e.height_spring);
  get(j, "tilt_spring", e.tilt_spring);
  get(j, "height_disturb_gain", e.height_disturb_gain);
  get(j, "tilt_disturb_gain", e.tilt_disturb_gain);
  get(j, "saturation_deadband", e.saturation_deadband);
  get(j, "height_fail_frac", e.height_fail_frac);
  get(j, "tilt_threshold", e.tilt_threshold);
  get(j, "reset_noise", e.reset_noise);
  get(j, "push_enabled", e.push_enabled);
  get(j, "push_interval_s", e.push_interval_s);
  get(j, "push_magnitude", e.push_magnitude);
  get(j, "hip_scale", e.hip_scale);
  get(j, "thigh_torque_limit", e.thigh_torque_limit);
  get(j, "qd_max", e.qd_max);
  get(j, "foot_force_max", e.foot_force_max);
  get(j, "friction_min", e.friction_min);
  get(j, "friction_max", e.friction_max);
  get(j, "payload_min", e.payload_min);
  get(j, "payload_max", e.payload_max);
  get(j, "motor_noise", e.motor_noise);
  get(j, "contact_scale_min", e.contact_scale_min);
  get(j, "contact_scale_max", e.contact_scale_max);
}

json ppo_to_json(const PPOConfig& p) {
  return json{{"clip_eps", p.clip_eps},
              {"value_coeff", p.value_coeff},
              {"entropy_coeff", p.entropy_coeff},
              {"learning_rate", p.learning_rate},
              {"adaptation_lr", p.adaptation_lr},
              {"epochs", p.epochs},
              {"minibatches", p.minibatches},
              {"gamma", p.gamma},
              {"lam", p.lam},
              {"desired_kl", p.desired_kl},
              {"max_grad_norm", p.max_grad_norm},
              {"rollout_horizon", p.rollout_horizon},
              {"lr_min", p.lr_min},
              {"lr_max", p.lr_max}};
}

void ppo_from_json(const json& j, PPOConfig& p) {
  check_keys(j,
             {"clip_eps", "value_coeff", "entropy_coeff", "learning_rate",
              "adaptation_lr", "epochs", "minibatches", "gamma", "lam",
              "desired_kl", "max_grad_norm", "rollout_horizon", "lr_min",
              "lr_max"},
             "ppo");
  get(j, "clip_eps", p.clip_eps);
  get(j, "value_coeff", p.value_coeff);
  get(j, "entropy_coeff", p.entropy_coeff);
  get(j, "learning_rate", p.learning_rate);
  get(j, "adaptation_lr", p.adaptation_lr);
  get(j, "epochs", p.epochs);
  get(j, "minibatches", p.minibatches);
  get(j, "gamma", p.gamma);
  get(j, "lam", p.lam);
  get(j, "desired_kl", p.desired_kl);
  get(j, "max_grad_norm", p.max_grad_norm);
  get(j, "rollout_horizon", p.rollout_horizon);
  get(j, "lr_min", p.lr_min);
  get(j, "lr_max", p.lr_max);
}

json rewards_to_json(const RewardWeights& rw) {
  json weights = json::object();
  const auto& names = reward_term_names();
  for (int t = 0; t < kNumRewardTerms; ++t) {
    weights[names[static_cast<size_t>(t)]] = rw.w[static_cast<size_t>(t)];
  }
  return json{{"sigma", rw.sigma}, {"weights", weights}};
}

void rewards_from_json(const json& j, RewardWeights& rw) {
  check_keys(j, {"sigma", "weights"}, "rewards");
  get(j, "sigma", rw.sigma);
  if (!j.contains("weights")) return;
  const auto& names = reward_term_names();
  for (auto it = j.at("weights").begin(); it != j.at("weights").end(); ++it) {
    auto pos = std::find(names.begin(), names.end(), it.key());
    if (pos == names.end()) {
      throw std::invalid_argument("unknown reward term 'rewards.weights." +
                                  it.key() + "'");
    }
    rw.w[static_cast<size_t>(pos - names.begin())] = it.value().get<double>();
  }
}

json range_to_json(const MorphologyRange& r) {
  json out = json::object();
  for (const auto& e : r.entries) out[e.name] = json{e.min, e.max};
  return out;
}

void range_from_json(const json& j, MorphologyRange& r) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto pos =
        std::find_if(r.entries.begin(), r.entries.end(),
                     [&](const auto& e) { return e.name == it.key(); });
    if (pos == r.entries.end()) {
      throw std::invalid_argument("unknown morphology parameter 'morphology." +
                                  it.key() + "'");
    }
    if (!it.value().is_array() || it.value().size() != 2) {
      throw std::invalid_argument("morphology." + it.key() +
                                  " must be [min, max]");
    }
    pos->min = it.value()[0].get<double>();
    pos->max = it.value()[1].get<double>();
  }
}

json hacl_to_json(const HaclConfig& h) {
  return json{{"hidden_size", h.hidden_size},
              {"learning_rate", h.learning_rate},
              {"tbptt_length", h.tbptt_length},
              {"weight_alpha", h.weight_alpha},
              {"average_pair", h.average_pair},
              {"initial_vx", h.initial_vx},
              {"initial_wz", h.initial_wz},
              {"expand_threshold", h.expand_threshold},
              {"max_tracking", h.max_tracking},
              {"seed_weight", h.seed_weight},
              {"max_replay", h.max_replay}};
}

void hacl_from_json(const json& j, HaclConfig& h) {
  check_keys(j,
             {"hidden_size", "learning_rate", "tbptt_length", "weight_alpha",
              "average_pair", "initial_vx", "initial_wz", "expand_threshold",
              "max_tracking", "seed_weight", "max_replay"},
             "hacl");
  get(j, "hidden_size", h.hidden_size);
  get(j, "learning_rate", h.learning_rate);
  get(j, "tbptt_length", h.tbptt_length);
  get(j, "weight_alpha", h.weight_alpha);
  get(j, "average_pair", h.average_pair);
  get(j, "initial_vx", h.initial_vx);
  get(j, "initial_wz", h.initial_wz);
  get(j, "expand_threshold", h.expand_threshold);
  get(j, "max_tracking", h.max_tracking);
  get(j, "seed_weight", h.seed_weight);
  get(j, "max_replay", h.max_replay);
}

json grid_to_json(const BinGrid& g) {
  return json{{"counts", g.counts}, {"lo", g.lo}, {"hi", g.hi}};
}

void grid_from_json(const json& j, BinGrid& g) {
  check_keys(j, {"counts", "lo", "hi"}, "grid");
  get(j, "counts", g.counts);
  get(j, "lo", g.lo);
  get(j, "hi", g.hi);
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  json j{{"env", env_to_json(cfg.env)},
         {"ppo", ppo_to_json(cfg.ppo)},
         {"rewards", rewards_to_json(cfg.rewards)},
         {"morphology", range_to_json(cfg.range)},
         {"hacl", hacl_to_json(cfg.hacl)},
         {"grid", grid_to_json(cfg.grid)},
         {"run",
          {{"variant", variant_name(cfg.variant)},
           {"seed", cfg.seed},
           {"num_envs", cfg.num_envs},
           {"iterations", cfg.iterations},
           {"checkpoint_interval", cfg.checkpoint_interval},
           {"output_dir", cfg.output_dir},
           {"preset", cfg.preset_path}}}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  check_keys(j, {"env", "ppo", "rewards", "morphology", "hacl", "grid", "run"},
             "(top level)");
  RunConfig cfg;
  if (j.contains("env")) env_from_json(j.at("env"), cfg.env);
  if (j.contains("ppo")) ppo_from_json(j.at("ppo"), cfg.ppo);
  if (j.contains("rewards")) rewards_from_json(j.at("rewards"), cfg.rewards);
  if (j.contains("morphology")) range_from_json(j.at("morphology"), cfg.range);
  if (j.contains("hacl")) hacl_from_json(j.at("hacl"), cfg.hacl);
  if (j.contains("grid")) grid_from_json(j.at("grid"), cfg.grid);
  if (j.contains("run")) {
    const json& r = j.at("run");
    check_keys(r,
               {"variant", "seed", "num_envs", "iterations",
                "checkpoint_interval", "output_dir", "preset"},
               "run");
    if (r.contains("variant")) {
      cfg.variant = parse_variant(r.at("variant").get<std::string>());
    }
    get(r, "seed", cfg.seed);
    get(r, "num_envs", cfg.num_envs);
    get(r, "iterations", cfg.iterations);
    get(r, "checkpoint_interval", cfg.checkpoint_interval);
    get(r, "output_dir", cfg.output_dir);
    get(r, "preset", cfg.preset_path);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return run_config_from_json(text);
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config file " + path);
  out << run_config_to_json(cfg);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like section.key=value: " +
                                assignment);
  }
  std::string key = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  std::string pointer = "/";
  for (char c : key) pointer += (c == '.') ? '/' : c;

  json j = json::parse(run_config_to_json(cfg));
  const json::json_pointer ptr(pointer);
  if (!j.contains(ptr)) {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare strings (e.g. variant=P3, paths)
  }
  j[ptr] = value;
  cfg = run_config_from_json(j.dump());
}

RobotPreset load_preset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open preset file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("preset parse error in " + path + ": " +
                                e.what());
  }
  check_keys(j, {"name", "morphology"}, "preset");
  RobotPreset p;
  p.name = j.at("name").get<std::string>();
  const json& m = j.at("morphology");
  const MorphologyRange defaults = MorphologyRange::defaults();
  for (auto it = m.begin(); it != m.end(); ++it) {
    auto pos = std::find_if(
        defaults.entries.begin(), defaults.entries.end(),
        [&](const auto& e) { return e.name == it.key(); });
    if (pos == defaults.entries.end()) {
      throw std::invalid_argument("unknown morphology parameter '" +
                                  it.key() + "' in " + path);
    }
    p.morphology[static_cast<int>(pos - defaults.entries.begin())] =
        it.value().get<double>();
  }
  if (m.size() != kMorphDim) {
    throw std::invalid_argument("preset " + path + " must set all " +
                                std::to_string(kMorphDim) +
                                " morphology parameters");
  }
  return p;
}

void save_preset(const std::string& path, const RobotPreset& preset) {
  const MorphologyRange defaults = MorphologyRange::defaults();
  json m = json::object();
  for (int k = 0; k < kMorphDim; ++k) {
    m[defaults.entries[static_cast<size_t>(k)].name] = preset.morphology[k];
  }
  json j{{"name", preset.name}, {"morphology", m}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write preset file " + path);
  out << j.dump(2) << "\n";
}

}  // namespace mcarl
