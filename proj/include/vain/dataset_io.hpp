#pragma once

#include <string>
#include <vector>

#include "vain/ballsim.hpp"
#include "vain/chess_data.hpp"
#include "vain/frame.hpp"
#include "vain/soccer.hpp"

namespace vain {

enum class TaskKind { Generic, Balls, Chess, Soccer };

struct Example {
  AgentFrame frame;
  Mat targets;     // regression heads
  int label = -1;  // classification heads
  std::string id;  // split-leakage accounting
};

struct Dataset {
  TaskKind kind = TaskKind::Generic;
  std::vector<Example> ex;
  int feature_dim = 0;
  int out_dim = 0;
  // task meta carried for baselines and de-scaling
  balls::BallConfig ball_config;
};

// Feature scaling conventions (documented in FORMATS.md):
//   balls : x/L, y/L, vx/v0, vy/v0; targets raw meters.
//   soccer: x/64, y/64, vx/8, vy/8, cos h, sin h, speed/8; targets raw meters.
//   chess : 29-dim one-hot per slot, absent slots masked.
constexpr double kSoccerPosScale = 64.0;  // powers of two keep scaling exact
constexpr double kSoccerVelScale = 8.0;

Dataset balls_to_dataset(const std::vector<balls::BallRecord>& records,
                         const balls::BallConfig& config);
Dataset chess_to_dataset(const std::vector<chess::MppExample>& examples,
                         const std::vector<std::string>& ids);
Dataset soccer_to_dataset(const std::vector<soccer::SoccerExample>& examples,
                          const std::string& source_id);

// Train/test split on whole trajectories (never inside one).
void split_by_trajectory(const std::vector<balls::BallRecord>& records, int n_test_trajectories,
                         std::vector<balls::BallRecord>& train, std::vector<balls::BallRecord>& test);

// Newline-delimited JSON dataset files; first line is a header object with
// the generating config and seed.
void write_balls_jsonl(const std::string& path, const std::vector<balls::BallRecord>& records,
                       const balls::BallConfig& config, uint64_t seed);
struct BallsFile {
  balls::BallConfig config;
  uint64_t seed = 0;
  std::vector<balls::BallRecord> records;
};
BallsFile read_balls_jsonl(const std::string& path);

void write_chess_jsonl(const std::string& path, const std::vector<chess::MppExample>& examples,
                       const std::vector<int>& game_of, int max_ply, int games_parsed,
                       int games_discarded);
struct ChessFile {
  int max_ply = 100;
  int games_parsed = 0;
  int games_discarded = 0;
  std::vector<chess::MppExample> examples;
  std::vector<int> game_of;  // originating game index per example
};
ChessFile read_chess_jsonl(const std::string& path);

void write_soccer_jsonl(const std::string& path, const std::vector<soccer::SoccerExample>& examples,
                        const std::string& source);
struct SoccerFile {
  std::string source;
  std::vector<soccer::SoccerExample> examples;
};
SoccerFile read_soccer_jsonl(const std::string& path);

}  // namespace vain
