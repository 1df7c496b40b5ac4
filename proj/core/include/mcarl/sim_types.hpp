#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace mcarl {

inline constexpr int kNumJoints = 12;  // 4 legs x (hip, thigh, calf)
inline constexpr int kNumFeet = 4;     // FL, FR, RL, RR
inline constexpr int kObsDim = 48;     // deployment-time observation
inline constexpr int kPrivDim = 18;    // simulation-only observation

using Joints12 = Eigen::Matrix<double, kNumJoints, 1>;
using Action12 = Eigen::Matrix<double, kNumJoints, 1>;

// velocity command in the base frame
struct Command {
  double vx = 0.0;     // m/s
  double vy = 0.0;     // m/s
  double wz = 0.0;     // rad/s

  double norm() const { return std::sqrt(vx * vx + vy * vy + wz * wz); }
};

enum class DoneReason : uint8_t { kNotDone = 0, kTimeout = 1, kFailure = 2 };

struct RobotState {
  Eigen::Vector3d base_pos = Eigen::Vector3d::Zero();   // world, z = height
  Eigen::Vector3d base_vel = Eigen::Vector3d::Zero();   // body frame
  double yaw = 0.0;
  double yaw_rate = 0.0;
  Eigen::Vector3d projected_gravity = Eigen::Vector3d(0, 0, -1);
  Joints12 q = Joints12::Zero();
  Joints12 qd = Joints12::Zero();
  Joints12 prev_qd = Joints12::Zero();
  Joints12 tau = Joints12::Zero();       // applied (post-clamp)
  Joints12 tau_raw = Joints12::Zero();   // requested (pre-clamp)
  std::array<uint8_t, kNumFeet> contact{};    // stance flags
  std::array<uint8_t, kNumFeet> touchdown{};  // first-contact this step
  std::array<double, kNumFeet> air_time{};    // seconds since liftoff
  std::array<double, kNumFeet> foot_fz{};     // vertical contact force, N
  std::array<double, kNumFeet> foot_fxy{};    // tangential contact force, N
  double tilt = 0.0;        // roll/pitch proxy, rad
  double tilt_rate = 0.0;
  double height_vel = 0.0;  // dz/dt of the base
  double gait_phase = 0.0;  // rad
  int collision_count = 0;
  int64_t step = 0;
  DoneReason done = DoneReason::kNotDone;
};

}  // namespace mcarl
