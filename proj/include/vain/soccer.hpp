#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vain/mat.hpp"

namespace vain::soccer {

struct PlayerSample {
  double t = 0;  // seconds
  int player_id = 0;
  double x = 0, y = 0;   // field meters
  double heading = 0;    // radians
  double speed = 0;      // m/s (sensor value)
};

struct SvppLoadResult {
  std::map<int, std::vector<PlayerSample>> streams;  // per player, time sorted
  int64_t parsed = 0;
  int64_t skipped = 0;
};

// 20 Hz positional sensor CSV. A header row is honored when present
// (time/timestamp, id/tag_id, x/x_pos, y/y_pos, heading, speed); without one
// the columns are taken positionally as
//   timestamp, tag_id, x_pos, y_pos, heading, direction, energy, speed, ...
// Timestamps may be float seconds or "YYYY-MM-DD HH:MM:SS.ff" (converted to
// seconds since midnight). Malformed rows are counted and skipped; a file
// whose layout cannot be recognized at all is rejected.
SvppLoadResult load_svpp(const std::string& path);
SvppLoadResult load_svpp_text(const std::string& csv);

struct PlayerState {
  double x = 0, y = 0;
  double vx = 0, vy = 0;  // backward difference over the 0.5 s ending here
  double heading = 0, speed = 0;
};

struct FrameSet {
  std::vector<int> player_ids;  // ascending
  std::vector<double> times;    // 0.5 s grid
  // state[k][p]: player p at grid point k; missing samples leave a gap
  std::vector<std::vector<std::optional<PlayerState>>> state;
  std::vector<uint8_t> complete;  // every player present with velocity

  int n_players() const { return static_cast<int>(player_ids.size()); }
  int n_frames() const { return static_cast<int>(times.size()); }
};

// Every 10th sample on a shared 0.5 s clock; velocity by backward difference
// against the 20 Hz stream. Players missing either sample leave the frame
// incomplete.
FrameSet resample_2hz(const SvppLoadResult& in);

struct FilterConfig {
  double max_jump_m = 12.0;  // strict: a jump of exactly 12 m is kept
  // Optional time window to drop wholesale (e.g. a half with sensor faults).
  std::optional<double> exclude_from;
  std::optional<double> exclude_to;
};

struct FilterStats {
  int dropped_jump = 0;
  int dropped_window = 0;
};

FilterStats filter_anomalies(FrameSet& frames, const FilterConfig& cfg);

constexpr int kHorizons = 8;        // T+0.5 .. T+4.0
constexpr int kSoccerFeatures = 7;  // x y vx vy cos(h) sin(h) speed

struct SoccerExample {
  double t = 0;
  std::vector<int> player_ids;
  Mat features;  // n x 7, raw units
  Mat targets;   // n x 16, per-horizon displacement (dx, dy), meters
};

// One example per grid point whose 8 future frames are all complete.
std::vector<SoccerExample> build_examples(const FrameSet& frames);

enum class BaselineKind { Static, Palv, Palaf, Pad };

// Per-horizon linear map from (x, y, vx, vy, cos, sin, speed, 1) to
// displacement, fitted by least squares with a tiny ridge.
struct PalafModel {
  Mat coef;  // 16 x 8
  bool fitted = false;
};

PalafModel fit_palaf(const std::vector<SoccerExample>& train);

// Predicted per-player displacements (n x 16). Palaf needs a fitted model.
Mat baseline_predict(const SoccerExample& ex, BaselineKind kind,
                     const PalafModel* palaf = nullptr);

struct SyntheticConfig {
  int n_players = 11;
  double duration_s = 60.0;
  double hz = 20.0;
  uint64_t seed = 7;
  bool interacting = true;  // false: exact constant-velocity tracks
};

// SVPP-layout CSV for tests and demos. Constant-velocity mode uses dyadic
// per-tick steps so finite differences and displacement targets are exact.
std::string synthetic_svpp_csv(const SyntheticConfig& cfg);

}  // namespace vain::soccer
