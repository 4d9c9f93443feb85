#include "vain/ballsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vain/rng.hpp"

namespace vain::balls {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double BallWorld::kinetic_energy() const {
  double e = 0.0;
  for (int i = 0; i < n(); ++i) e += 0.5 * (vx[i] * vx[i] + vy[i] * vy[i]);
  return e;
}

BallWorld init_world(const BallConfig& config, uint64_t seed) {
  const double L = config.box_size, r = config.radius;
  if (config.n_balls < 1) throw std::invalid_argument("init_world: n_balls < 1");
  if (L <= 4 * r) throw std::invalid_argument("init_world: box too small");
  const double packing = config.n_balls * std::numbers::pi * r * r / (L * L);
  if (packing > 0.3) throw std::invalid_argument("init_world: packing fraction > 0.3");

  BallWorld w;
  w.config = config;
  Rng rng(seed);
  const double lo = r, hi = L - r;
  int attempts = 0;
  while (w.px.size() < static_cast<size_t>(config.n_balls)) {
    if (++attempts > 100000) throw std::runtime_error("init_world: placement failed");
    const double x = next_uniform(rng, lo, hi);
    const double y = next_uniform(rng, lo, hi);
    bool clear = true;
    for (size_t j = 0; j < w.px.size(); ++j) {
      const double dx = w.px[j] - x, dy = w.py[j] - y;
      if (dx * dx + dy * dy < 4 * r * r) {
        clear = false;
        break;
      }
    }
    if (clear) {
      w.px.push_back(x);
      w.py.push_back(y);
    }
  }
  for (int i = 0; i < config.n_balls; ++i) w.vx.push_back(next_uniform(rng, -config.v0, config.v0));
  for (int i = 0; i < config.n_balls; ++i) w.vy.push_back(next_uniform(rng, -config.v0, config.v0));
  return w;
}

void step(BallWorld& w) {
  const double L = w.config.box_size, r = w.config.radius, dt = w.config.dt;
  const int n = w.n();
  for (int i = 0; i < n; ++i) {
    w.px[i] += w.vx[i] * dt;
    w.py[i] += w.vy[i] * dt;
    if (w.px[i] < r) {
      w.px[i] = 2 * r - w.px[i];
      w.vx[i] = -w.vx[i];
    } else if (w.px[i] > L - r) {
      w.px[i] = 2 * (L - r) - w.px[i];
      w.vx[i] = -w.vx[i];
    }
    if (w.py[i] < r) {
      w.py[i] = 2 * r - w.py[i];
      w.vy[i] = -w.vy[i];
    } else if (w.py[i] > L - r) {
      w.py[i] = 2 * (L - r) - w.py[i];
      w.vy[i] = -w.vy[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = w.px[j] - w.px[i];
      const double dy = w.py[j] - w.py[i];
      const double d2 = dx * dx + dy * dy;
      if (d2 >= 4 * r * r || d2 == 0.0) continue;
      const double dist = std::sqrt(d2);
      const double nx = dx / dist, ny = dy / dist;
      const double closing = (w.vx[i] - w.vx[j]) * nx + (w.vy[i] - w.vy[j]) * ny;
      if (closing > 0.0) {
        // Equal masses: the normal velocity components swap.
        w.vx[i] -= closing * nx;
        w.vy[i] -= closing * ny;
        w.vx[j] += closing * nx;
        w.vy[j] += closing * ny;
      }
      const double push = (2 * r - dist) / 2;
      w.px[i] -= push * nx;
      w.py[i] -= push * ny;
      w.px[j] += push * nx;
      w.py[j] += push * ny;
    }
  }
  // De-overlap shifts can nudge a ball past a wall; clamp without reflecting
  // since this is overlap resolution, not motion.
  for (int i = 0; i < n; ++i) {
    w.px[i] = std::max(r, std::min(L - r, w.px[i]));
    w.py[i] = std::max(r, std::min(L - r, w.py[i]));
  }
}

std::vector<BallRecord> generate_dataset(const BallConfig& config, int n_trajectories,
                                         int steps_per_traj, uint64_t seed) {
  std::vector<BallRecord> out;
  out.reserve(static_cast<size_t>(n_trajectories) * steps_per_traj);
  for (int traj = 0; traj < n_trajectories; ++traj) {
    BallWorld w = init_world(config, splitmix64(seed + static_cast<uint64_t>(traj)));
    for (int t = 0; t < steps_per_traj; ++t) {
      BallRecord rec;
      rec.traj = traj;
      rec.t = t;
      rec.balls.resize(config.n_balls);
      for (int i = 0; i < config.n_balls; ++i) {
        rec.balls[i] = {w.px[i], w.py[i], w.vx[i], w.vy[i], 0, 0, 0, 0};
      }
      step(w);
      for (int i = 0; i < config.n_balls; ++i) {
        rec.balls[i].dx = w.px[i] - rec.balls[i].x;
        rec.balls[i].dy = w.py[i] - rec.balls[i].y;
        rec.balls[i].dvx = w.vx[i] - rec.balls[i].vx;
        rec.balls[i].dvy = w.vy[i] - rec.balls[i].vy;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace vain::balls
