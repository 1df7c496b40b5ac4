#include "mcarl/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mcarl {

void BinWriter::u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }

void BinWriter::u32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
}

void BinWriter::u64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
}

void BinWriter::i64(int64_t v) { u64(static_cast<uint64_t>(v)); }

void BinWriter::f64(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  u64(bits);
}

void BinWriter::str(const std::string& s) {
  u64(s.size());
  buf_.append(s);
}

void BinWriter::matrix(const Eigen::MatrixXd& m) {
  u64(static_cast<uint64_t>(m.rows()));
  u64(static_cast<uint64_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) f64(m(r, c));
  }
}

void BinWriter::vector(const Eigen::VectorXd& v) {
  u64(static_cast<uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
}

void BinReader::need(size_t n) const {
  if (pos_ + n > buf_.size()) {
    throw std::runtime_error("checkpoint: truncated data");
  }
}

uint8_t BinReader::u8() {
  need(1);
  return static_cast<uint8_t>(buf_[pos_++]);
}

uint32_t BinReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(buf_[pos_++])) << (8 * i);
  }
  return v;
}

uint64_t BinReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<uint64_t>(static_cast<uint8_t>(buf_[pos_++])) << (8 * i);
  }
  return v;
}

int64_t BinReader::i64() { return static_cast<int64_t>(u64()); }

double BinReader::f64() {
  const uint64_t bits = u64();
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

std::string BinReader::str() {
  const uint64_t n = u64();
  need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::string BinReader::str_raw(size_t n) {
  need(n);
  std::string s = buf_.substr(pos_, n);
  pos_ += n;
  return s;
}

Eigen::MatrixXd BinReader::matrix() {
  const auto rows = static_cast<Eigen::Index>(u64());
  const auto cols = static_cast<Eigen::Index>(u64());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = f64();
  }
  return m;
}

Eigen::VectorXd BinReader::vector() {
  const auto n = static_cast<Eigen::Index>(u64());
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
  return v;
}

uint32_t crc32(const std::string& data) {
  static std::array<uint32_t, 256> table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xedb88320U ^ (c >> 1) : c >> 1;
      }
      t[i] = c;
    }
    return t;
  }();
  uint32_t c = 0xffffffffU;
  for (unsigned char ch : data) c = table[(c ^ ch) & 0xffU] ^ (c >> 8);
  return c ^ 0xffffffffU;
}

void write_param_store(BinWriter& w, const ParamStore& store) {
  w.u64(static_cast<uint64_t>(store.params().size()));
  w.i64(store.step_count());
  for (const Param& p : store.params()) {
    w.str(p.name);
    w.matrix(p.value);
    w.matrix(p.adam_m);
    w.matrix(p.adam_v);
  }
}

void read_param_store(BinReader& r, ParamStore& store) {
  const uint64_t n = r.u64();
  if (n != store.params().size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  store.set_step_count(r.i64());
  for (Param& p : store.params()) {
    const std::string name = r.str();
    if (name != p.name) {
      throw std::runtime_error("checkpoint: parameter name mismatch, got '" +
                               name + "', expected '" + p.name + "'");
    }
    Eigen::MatrixXd value = r.matrix();
    Eigen::MatrixXd m = r.matrix();
    Eigen::MatrixXd v = r.matrix();
    if (value.rows() != p.value.rows() || value.cols() != p.value.cols()) {
      throw std::runtime_error("checkpoint: shape mismatch for '" + p.name +
                               "'");
    }
    p.value = value;
    p.adam_m = m;
    p.adam_v = v;
  }
}

void write_rng(BinWriter& w, const Rng& rng) { w.str(rng.serialize()); }

void read_rng(BinReader& r, Rng& rng) { rng.deserialize(r.str()); }

void write_lstm_state(BinWriter& w, const LstmState& s) {
  w.vector(s.hidden);
  w.vector(s.cell);
}

LstmState read_lstm_state(BinReader& r) {
  LstmState s;
  s.hidden = r.vector();
  s.cell = r.vector();
  return s;
}

void write_hacl(BinWriter& w, const HaclCurriculum& cur) {
  write_param_store(w, cur.predictor_store());
  write_lstm_state(w, cur.hidden_state());
  w.vector(cur.weights());
  const auto& active = cur.active();
  w.u64(active.size());
  for (uint8_t a : active) w.u8(a);
  for (int v : cur.frontier()) w.i64(v);
  w.vector(cur.observed_sum());
  w.vector(cur.observed_count());
  const auto& pending = cur.pending();
  w.u64(pending.size());
  for (const CurriculumRecord& rec : pending) {
    w.i64(rec.bin);
    w.f64(rec.r_lin);
    w.f64(rec.r_ang);
  }
}

void read_hacl(BinReader& r, HaclCurriculum& cur) {
  read_param_store(r, cur.predictor_store());
  cur.hidden_state() = read_lstm_state(r);
  cur.mutable_weights() = r.vector();
  const uint64_t na = r.u64();
  if (na != cur.active().size()) {
    throw std::runtime_error("checkpoint: curriculum grid size mismatch");
  }
  for (auto& a : cur.mutable_active()) a = r.u8();
  for (auto& v : cur.frontier()) v = static_cast<int>(r.i64());
  cur.mutable_observed_sum() = r.vector();
  cur.mutable_observed_count() = r.vector();
  cur.pending().clear();
  const uint64_t np = r.u64();
  for (uint64_t i = 0; i < np; ++i) {
    CurriculumRecord rec;
    rec.bin = static_cast<int>(r.i64());
    rec.r_lin = r.f64();
    rec.r_ang = r.f64();
    cur.pending().push_back(rec);
  }
}

void write_fixed_rule(BinWriter& w, const FixedRuleCurriculum& cur) {
  for (int v : cur.frontier()) w.i64(v);
  w.f64(cur.recent_sum());
  w.f64(cur.recent_count());
}

void read_fixed_rule(BinReader& r, FixedRuleCurriculum& cur) {
  for (auto& v : cur.mutable_frontier()) v = static_cast<int>(r.i64());
  cur.mutable_recent_sum() = r.f64();
  cur.mutable_recent_count() = r.f64();
}

namespace {

void write_joints(BinWriter& w, const Joints12& j) {
  for (int i = 0; i < kNumJoints; ++i) w.f64(j(i));
}

Joints12 read_joints(BinReader& r) {
  Joints12 j;
  for (int i = 0; i < kNumJoints; ++i) j(i) = r.f64();
  return j;
}

void write_vec3(BinWriter& w, const Eigen::Vector3d& v) {
  w.f64(v.x());
  w.f64(v.y());
  w.f64(v.z());
}

Eigen::Vector3d read_vec3(BinReader& r) {
  Eigen::Vector3d v;
  v.x() = r.f64();
  v.y() = r.f64();
  v.z() = r.f64();
  return v;
}

}  // namespace

void EnvSnapshot::save(BinWriter& w, const SurrogateEnv& env) {
  for (int k = 0; k < kMorphDim; ++k) w.f64(env.morph_[k]);
  w.f64(env.cmd_.vx);
  w.f64(env.cmd_.vy);
  w.f64(env.cmd_.wz);

  const MorphConsts& mc = env.consts_;
  w.f64(mc.total_mass);
  w.f64(mc.leg_length);
  write_joints(w, mc.inertia);
  write_joints(w, mc.tau_max);
  w.f64(mc.kp);
  w.f64(mc.kd);
  w.f64(mc.action_scale);
  w.f64(mc.motor_strength);

  const PrivilegedFactors& pf = env.factors_;
  w.f64(pf.friction);
  w.f64(pf.payload);
  write_joints(w, pf.motor_strength);
  w.f64(pf.push_vel.x());
  w.f64(pf.push_vel.y());
  w.f64(pf.contact_scale.x());
  w.f64(pf.contact_scale.y());

  const RobotState& s = env.state_;
  write_vec3(w, s.base_pos);
  write_vec3(w, s.base_vel);
  w.f64(s.yaw);
  w.f64(s.yaw_rate);
  write_vec3(w, s.projected_gravity);
  write_joints(w, s.q);
  write_joints(w, s.qd);
  write_joints(w, s.prev_qd);
  write_joints(w, s.tau);
  write_joints(w, s.tau_raw);
  for (int f = 0; f < kNumFeet; ++f) w.u8(s.contact[f]);
  for (int f = 0; f < kNumFeet; ++f) w.u8(s.touchdown[f]);
  for (int f = 0; f < kNumFeet; ++f) w.f64(s.air_time[f]);
  for (int f = 0; f < kNumFeet; ++f) w.f64(s.foot_fz[f]);
  for (int f = 0; f < kNumFeet; ++f) w.f64(s.foot_fxy[f]);
  w.f64(s.tilt);
  w.f64(s.tilt_rate);
  w.f64(s.height_vel);
  w.f64(s.gait_phase);
  w.i64(s.collision_count);
  w.i64(s.step);
  w.u8(static_cast<uint8_t>(s.done));

  for (int i = 0; i < kNumJoints; ++i) w.f64(env.prev_action_(i));
  write_rng(w, env.push_rng_);
}

void EnvSnapshot::load(BinReader& r, SurrogateEnv& env) {
  for (int k = 0; k < kMorphDim; ++k) env.morph_[k] = r.f64();
  env.cmd_.vx = r.f64();
  env.cmd_.vy = r.f64();
  env.cmd_.wz = r.f64();

  MorphConsts& mc = env.consts_;
  mc.total_mass = r.f64();
  mc.leg_length = r.f64();
  mc.inertia = read_joints(r);
  mc.tau_max = read_joints(r);
  mc.kp = r.f64();
  mc.kd = r.f64();
  mc.action_scale = r.f64();
  mc.motor_strength = r.f64();

  PrivilegedFactors& pf = env.factors_;
  pf.friction = r.f64();
  pf.payload = r.f64();
  pf.motor_strength = read_joints(r);
  pf.push_vel.x() = r.f64();
  pf.push_vel.y() = r.f64();
  pf.contact_scale.x() = r.f64();
  pf.contact_scale.y() = r.f64();

  RobotState& s = env.state_;
  s.base_pos = read_vec3(r);
  s.base_vel = read_vec3(r);
  s.yaw = r.f64();
  s.yaw_rate = r.f64();
  s.projected_gravity = read_vec3(r);
  s.q = read_joints(r);
  s.qd = read_joints(r);
  s.prev_qd = read_joints(r);
  s.tau = read_joints(r);
  s.tau_raw = read_joints(r);
  for (int f = 0; f < kNumFeet; ++f) s.contact[f] = r.u8();
  for (int f = 0; f < kNumFeet; ++f) s.touchdown[f] = r.u8();
  for (int f = 0; f < kNumFeet; ++f) s.air_time[f] = r.f64();
  for (int f = 0; f < kNumFeet; ++f) s.foot_fz[f] = r.f64();
  for (int f = 0; f < kNumFeet; ++f) s.foot_fxy[f] = r.f64();
  s.tilt = r.f64();
  s.tilt_rate = r.f64();
  s.height_vel = r.f64();
  s.gait_phase = r.f64();
  s.collision_count = static_cast<int>(r.i64());
  s.step = r.i64();
  s.done = static_cast<DoneReason>(r.u8());

  for (int i = 0; i < kNumJoints; ++i) env.prev_action_(i) = r.f64();
  read_rng(r, env.push_rng_);
}

void write_checkpoint_file(const std::string& path,
                           const std::string& payload) {
  BinWriter header;
  header.u32(kCheckpointMagic);
  header.u32(kCheckpointVersion);
  header.u32(crc32(payload));
  header.u64(payload.size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(header.buffer().data(),
            static_cast<std::streamsize>(header.buffer().size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::string read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  BinReader r(std::move(data));
  if (r.u32() != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));
  }
  const uint32_t checksum = r.u32();
  const uint64_t n = r.u64();
  if (n != r.remaining()) {
    throw std::runtime_error("checkpoint: payload size mismatch in " + path);
  }
  std::string payload = r.str_raw(n);
  if (crc32(payload) != checksum) {
    throw std::runtime_error("checkpoint: checksum mismatch in " + path);
  }
  return payload;
}

}  // namespace mcarl
