#pragma once

#include <cstdint>
#include <vector>

namespace vain::balls {

struct BallConfig {
  double box_size = 10.0;  // L, meters
  double radius = 0.25;    // meters
  int n_balls = 8;
  double v0 = 3.0;  // max initial speed per component, m/s
  double dt = 0.1;  // seconds
};

struct BallWorld {
  BallConfig config;
  std::vector<double> px, py, vx, vy;

  int n() const { return static_cast<int>(px.size()); }
  double kinetic_energy() const;  // unit mass per ball
};

// Rejection-samples non-overlapping positions in [r, L-r]^2, then velocities
// uniform per component in [-v0, v0]. Deterministic per seed. Throws when the
// packing fraction exceeds 0.3 or sampling keeps colliding.
BallWorld init_world(const BallConfig& config, uint64_t seed);

// One dt of motion: advect, reflect wall crossings, then a single ordered pass
// of equal-mass elastic impulses over overlapping, approaching pairs with a
// symmetric positional de-overlap.
void step(BallWorld& world);

struct BallStep {
  double x, y, vx, vy;      // state at t
  double dx, dy, dvx, dvy;  // deltas to t + dt
};

struct BallRecord {
  int traj = 0;
  int t = 0;
  std::vector<BallStep> balls;
};

// Rolls out n_trajectories x steps_per_traj supervised samples. Each
// trajectory gets its own derived seed, so generation order does not matter.
std::vector<BallRecord> generate_dataset(const BallConfig& config, int n_trajectories,
                                         int steps_per_traj, uint64_t seed);

}  // namespace vain::balls
