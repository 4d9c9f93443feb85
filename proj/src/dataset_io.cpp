#include "vain/dataset_io.hpp"

#include <fstream>

#include "json.hpp"

namespace vain {

using json = nlohmann::json;

Dataset balls_to_dataset(const std::vector<balls::BallRecord>& records,
                         const balls::BallConfig& config) {
  Dataset d;
  d.kind = TaskKind::Balls;
  d.feature_dim = 4;
  d.out_dim = 4;
  d.ball_config = config;
  const double L = config.box_size, v0 = config.v0;
  d.ex.reserve(records.size());
  for (const auto& rec : records) {
    Example e;
    const int n = static_cast<int>(rec.balls.size());
    e.frame.features = Mat(n, 4);
    e.frame.mask.assign(n, 1);
    e.targets = Mat(n, 4);
    for (int i = 0; i < n; ++i) {
      const auto& b = rec.balls[i];
      e.frame.features(i, 0) = b.x / L;
      e.frame.features(i, 1) = b.y / L;
      e.frame.features(i, 2) = b.vx / v0;
      e.frame.features(i, 3) = b.vy / v0;
      e.targets(i, 0) = b.dx;
      e.targets(i, 1) = b.dy;
      e.targets(i, 2) = b.dvx;
      e.targets(i, 3) = b.dvy;
    }
    e.id = "traj" + std::to_string(rec.traj) + ":t" + std::to_string(rec.t);
    d.ex.push_back(std::move(e));
  }
  return d;
}

Dataset chess_to_dataset(const std::vector<chess::MppExample>& examples,
                         const std::vector<std::string>& ids) {
  Dataset d;
  d.kind = TaskKind::Chess;
  d.feature_dim = chess::kMppFeatureDim;
  d.out_dim = 1;
  d.ex.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    Example e;
    e.frame = chess::to_frame(examples[i]);
    e.label = examples[i].label;
    e.id = ids.empty() ? "ex" + std::to_string(i) : ids[i];
    d.ex.push_back(std::move(e));
  }
  return d;
}

Dataset soccer_to_dataset(const std::vector<soccer::SoccerExample>& examples,
                          const std::string& source_id) {
  Dataset d;
  d.kind = TaskKind::Soccer;
  d.feature_dim = soccer::kSoccerFeatures;
  d.out_dim = 2 * soccer::kHorizons;
  d.ex.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    Example e;
    const int n = ex.features.rows;
    e.frame.features = Mat(n, soccer::kSoccerFeatures);
    e.frame.mask.assign(n, 1);
    for (int p = 0; p < n; ++p) {
      e.frame.features(p, 0) = ex.features(p, 0) / kSoccerPosScale;
      e.frame.features(p, 1) = ex.features(p, 1) / kSoccerPosScale;
      e.frame.features(p, 2) = ex.features(p, 2) / kSoccerVelScale;
      e.frame.features(p, 3) = ex.features(p, 3) / kSoccerVelScale;
      e.frame.features(p, 4) = ex.features(p, 4);
      e.frame.features(p, 5) = ex.features(p, 5);
      e.frame.features(p, 6) = ex.features(p, 6) / kSoccerVelScale;
    }
    e.targets = ex.targets;
    e.id = source_id + ":t" + std::to_string(ex.t);
    d.ex.push_back(std::move(e));
  }
  return d;
}

void split_by_trajectory(const std::vector<balls::BallRecord>& records, int n_test_trajectories,
                         std::vector<balls::BallRecord>& train, std::vector<balls::BallRecord>& test) {
  int max_traj = -1;
  for (const auto& r : records) max_traj = std::max(max_traj, r.traj);
  const int cut = max_traj + 1 - n_test_trajectories;
  for (const auto& r : records) {
    (r.traj < cut ? train : test).push_back(r);
  }
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

}  // namespace

void write_balls_jsonl(const std::string& path, const std::vector<balls::BallRecord>& records,
                       const balls::BallConfig& config, uint64_t seed) {
  auto out = open_out(path);
  json header = {{"type", "balls"},
                 {"version", 1},
                 {"seed", seed},
                 {"config",
                  {{"box_size", config.box_size},
                   {"radius", config.radius},
                   {"n_balls", config.n_balls},
                   {"v0", config.v0},
                   {"dt", config.dt}}}};
  out << header.dump() << "\n";
  for (const auto& rec : records) {
    json balls = json::array();
    for (const auto& b : rec.balls) {
      balls.push_back({{"x", b.x},
                       {"y", b.y},
                       {"vx", b.vx},
                       {"vy", b.vy},
                       {"dx", b.dx},
                       {"dy", b.dy},
                       {"dvx", b.dvx},
                       {"dvy", b.dvy}});
    }
    out << json{{"t", rec.t}, {"traj", rec.traj}, {"balls", std::move(balls)}}.dump() << "\n";
  }
}

BallsFile read_balls_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  const json header = json::parse(line);
  if (header.value("type", "") != "balls") throw std::runtime_error("not a balls dataset: " + path);
  BallsFile file;
  file.seed = header.value("seed", static_cast<uint64_t>(0));
  const json& cfg = header.at("config");
  file.config.box_size = cfg.at("box_size").get<double>();
  file.config.radius = cfg.at("radius").get<double>();
  file.config.n_balls = cfg.at("n_balls").get<int>();
  file.config.v0 = cfg.at("v0").get<double>();
  file.config.dt = cfg.at("dt").get<double>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    balls::BallRecord rec;
    rec.t = j.at("t").get<int>();
    rec.traj = j.value("traj", 0);
    for (const json& b : j.at("balls")) {
      rec.balls.push_back({b.at("x").get<double>(), b.at("y").get<double>(),
                           b.at("vx").get<double>(), b.at("vy").get<double>(),
                           b.at("dx").get<double>(), b.at("dy").get<double>(),
                           b.at("dvx").get<double>(), b.at("dvy").get<double>()});
    }
    file.records.push_back(std::move(rec));
  }
  return file;
}

void write_chess_jsonl(const std::string& path, const std::vector<chess::MppExample>& examples,
                       const std::vector<int>& game_of, int max_ply, int games_parsed,
                       int games_discarded) {
  if (!game_of.empty() && game_of.size() != examples.size()) {
    throw std::invalid_argument("write_chess_jsonl: game_of size mismatch");
  }
  auto out = open_out(path);
  out << json{{"type", "chess-mpp"},
              {"version", 1},
              {"max_ply", max_ply},
              {"games_parsed", games_parsed},
              {"games_discarded", games_discarded}}
             .dump()
      << "\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    json slots = json::array();
    for (const auto& s : ex.slots) slots.push_back({s[0], s[1], s[2]});
    out << json{{"game", game_of.empty() ? 0 : game_of[i]},
                {"slots", std::move(slots)},
                {"label", ex.label}}
               .dump()
        << "\n";
  }
}

ChessFile read_chess_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  const json header = json::parse(line);
  if (header.value("type", "") != "chess-mpp") {
    throw std::runtime_error("not a chess-mpp dataset: " + path);
  }
  ChessFile file;
  file.max_ply = header.value("max_ply", 100);
  file.games_parsed = header.value("games_parsed", 0);
  file.games_discarded = header.value("games_discarded", 0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    chess::MppExample ex;
    const json& slots = j.at("slots");
    for (int s = 0; s < chess::kMppSlots; ++s) {
      ex.slots[s] = {slots[s][0].get<int>(), slots[s][1].get<int>(), slots[s][2].get<int>()};
    }
    ex.label = j.at("label").get<int>();
    file.examples.push_back(ex);
    file.game_of.push_back(j.value("game", 0));
  }
  return file;
}

void write_soccer_jsonl(const std::string& path, const std::vector<soccer::SoccerExample>& examples,
                        const std::string& source) {
  auto out = open_out(path);
  out << json{{"type", "soccer"}, {"version", 1}, {"source", source}, {"horizons", soccer::kHorizons}}
             .dump()
      << "\n";
  for (const auto& ex : examples) {
    json agents = json::array();
    for (int p = 0; p < ex.features.rows; ++p) {
      json targets = json::array();
      for (int h = 0; h < soccer::kHorizons; ++h) {
        targets.push_back({ex.targets(p, 2 * h), ex.targets(p, 2 * h + 1)});
      }
      agents.push_back({{"id", ex.player_ids[p]},
                        {"x", ex.features(p, 0)},
                        {"y", ex.features(p, 1)},
                        {"vx", ex.features(p, 2)},
                        {"vy", ex.features(p, 3)},
                        {"hcos", ex.features(p, 4)},
                        {"hsin", ex.features(p, 5)},
                        {"speed", ex.features(p, 6)},
                        {"targets", std::move(targets)}});
    }
    out << json{{"t", ex.t}, {"agents", std::move(agents)}}.dump() << "\n";
  }
}

SoccerFile read_soccer_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  const json header = json::parse(line);
  if (header.value("type", "") != "soccer") throw std::runtime_error("not a soccer dataset: " + path);
  SoccerFile file;
  file.source = header.value("source", "");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    soccer::SoccerExample ex;
    ex.t = j.at("t").get<double>();
    const json& agents = j.at("agents");
    const int n = static_cast<int>(agents.size());
    ex.features = Mat(n, soccer::kSoccerFeatures);
    ex.targets = Mat(n, 2 * soccer::kHorizons);
    for (int p = 0; p < n; ++p) {
      const json& a = agents[p];
      ex.player_ids.push_back(a.at("id").get<int>());
      ex.features(p, 0) = a.at("x").get<double>();
      ex.features(p, 1) = a.at("y").get<double>();
      ex.features(p, 2) = a.at("vx").get<double>();
      ex.features(p, 3) = a.at("vy").get<double>();
      ex.features(p, 4) = a.at("hcos").get<double>();
      ex.features(p, 5) = a.at("hsin").get<double>();
      ex.features(p, 6) = a.at("speed").get<double>();
      const json& targets = a.at("targets");
      for (int h = 0; h < soccer::kHorizons; ++h) {
        ex.targets(p, 2 * h) = targets[h][0].get<double>();
        ex.targets(p, 2 * h + 1) = targets[h][1].get<double>();
      }
    }
    file.examples.push_back(std::move(ex));
  }
  return file;
}

}  // namespace vain
