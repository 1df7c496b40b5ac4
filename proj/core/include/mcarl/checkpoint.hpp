#pragma once

#include <cstdint>
#include <string>

#include "mcarl/curriculum.hpp"
#include "mcarl/env.hpp"
#include "mcarl/param_store.hpp"
#include "mcarl/rng.hpp"

namespace mcarl {

// Append-only binary buffer with explicit little-endian primitives so
// checkpoints are byte-identical across runs on the same platform.
class BinWriter {
 public:
  void u8(uint8_t v);
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v);
  void f64(double v);
  void str(const std::string& s);
  void matrix(const Eigen::MatrixXd& m);
  void vector(const Eigen::VectorXd& v);

  const std::string& buffer() const { return buf_; }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

// Reader mirror; every accessor throws std::runtime_error on truncation.
class BinReader {
 public:
  explicit BinReader(std::string data) : buf_(std::move(data)) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64();
  double f64();
  std::string str();
  std::string str_raw(size_t n);  // n bytes, no length prefix
  Eigen::MatrixXd matrix();
  Eigen::VectorXd vector();

  size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(size_t n) const;

  std::string buf_;
  size_t pos_ = 0;
};

uint32_t crc32(const std::string& data);

// parameter stores are written name-checked and shape-checked so a
// checkpoint can only restore into a structurally identical model
void write_param_store(BinWriter& w, const ParamStore& store);
void read_param_store(BinReader& r, ParamStore& store);

void write_rng(BinWriter& w, const Rng& rng);
void read_rng(BinReader& r, Rng& rng);

void write_lstm_state(BinWriter& w, const LstmState& s);
LstmState read_lstm_state(BinReader& r);

void write_hacl(BinWriter& w, const HaclCurriculum& cur);
void read_hacl(BinReader& r, HaclCurriculum& cur);

void write_fixed_rule(BinWriter& w, const FixedRuleCurriculum& cur);
void read_fixed_rule(BinReader& r, FixedRuleCurriculum& cur);

// full environment snapshot: morphology, command, derived constants,
// privileged factors, robot state, previous action and the push stream
struct EnvSnapshot {
  static void save(BinWriter& w, const SurrogateEnv& env);
  static void load(BinReader& r, SurrogateEnv& env);
};

// container: magic, format version, CRC32 of the payload, payload
inline constexpr uint32_t kCheckpointMagic = 0x4c52434dU;  // "MCRL"
inline constexpr uint32_t kCheckpointVersion = 1;

void write_checkpoint_file(const std::string& path, const std::string& payload);
// verifies magic, version and checksum; returns the payload
std::string read_checkpoint_file(const std::string& path);

}  // namespace mcarl
