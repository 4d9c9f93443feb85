// Command line front end: dataset generation and ingestion, training,
// evaluation, attention export, and the complexity bench.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "CLI11.hpp"
#include "json.hpp"

#include "vain/checkpoint.hpp"
#include "vain/chess_selfplay.hpp"
#include "vain/configfile.hpp"
#include "vain/dataset_io.hpp"
#include "vain/experiments.hpp"
#include "vain/trainer.hpp"

#ifndef VAIN_BUILD_ID
#define VAIN_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace vain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

void write_manifest(const std::string& dir, const std::string& command, const Config& resolved,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  fs::create_directories(dir);
  json m = {{"command", command},
            {"config", json::object()},
            {"config_hash", resolved.hash_hex()},
            {"seed", resolved.get_u64("seed", 0)},
            {"inputs", inputs},
            {"outputs", outputs},
            {"build", VAIN_BUILD_ID}};
  for (const auto& [k, v] : resolved.kv) m["config"][k] = v;
  std::ofstream out(dir + "/manifest.json");
  out << m.dump(2) << "\n";
}

std::string sniff_dataset_type(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);
  std::string line;
  std::getline(in, line);
  try {
    return json::parse(line).value("type", "");
  } catch (...) {
    throw DataError("not a dataset file (missing JSON header): " + path);
  }
}

ModelSpec spec_from_config(const Config& cfg, const std::string& task, int feature_dim, int out_dim) {
  const Arch arch = arch_from_string(cfg.get_str("model.arch", "vain"));
  const uint64_t seed = cfg.get_u64("seed", 0);
  ModelSpec spec;
  if (task == "balls") {
    spec = balls_spec(arch, seed, cfg.get_int("model.hidden", 64), cfg.get_int("model.enc_out", 32));
  } else if (task == "chess-mpp") {
    spec = chess_spec(arch, seed, cfg.get_int("model.width", 64));
  } else if (task == "soccer") {
    spec = soccer_spec(arch, seed, cfg.get_int("model.hidden", 256), cfg.get_int("model.enc_out", 128));
  } else {
    throw std::invalid_argument("unknown task: " + task);
  }
  spec.feature_dim = feature_dim;
  if (spec.arch != Arch::Fc && spec.arch != Arch::OneHopFc) spec.out_dim = out_dim;
  if (cfg.has("model.kernel")) spec.kernel = kernel_from_string(cfg.get_str("model.kernel", "softmax"));
  if (cfg.has("model.batchnorm")) spec.batchnorm = cfg.get_bool("model.batchnorm", spec.batchnorm);
  if (cfg.has("model.attn_dim")) spec.attn_dim = cfg.get_int("model.attn_dim", spec.attn_dim);
  if (cfg.has("model.psi_hidden") || cfg.has("model.psi_depth")) {
    const int h = cfg.get_int("model.psi_hidden", spec.psi_hidden.empty() ? 32 : spec.psi_hidden[0]);
    const int depth = cfg.get_int("model.psi_depth", static_cast<int>(spec.psi_hidden.size()));
    spec.psi_hidden.assign(depth, h);
  }
  return spec;
}

struct LoadedTask {
  std::string task;
  Dataset train, test;
};

// Loads a dataset file and applies the task's structural split (trajectories
// for balls, games for chess, trailing time block for soccer).
LoadedTask load_and_split(const std::string& path, const std::string& test_path,
                          double test_fraction, uint64_t seed) {
  LoadedTask out;
  const std::string type = sniff_dataset_type(path);
  out.task = type;
  if (type == "balls") {
    BallsFile f = read_balls_jsonl(path);
    if (!test_path.empty()) {
      out.train = balls_to_dataset(f.records, f.config);
      BallsFile t = read_balls_jsonl(test_path);
      out.test = balls_to_dataset(t.records, t.config);
    } else {
      int max_traj = 0;
      for (const auto& r : f.records) max_traj = std::max(max_traj, r.traj);
      std::vector<balls::BallRecord> train_recs, test_recs;
      split_by_trajectory(f.records, std::max(1, static_cast<int>((max_traj + 1) * test_fraction)),
                          train_recs, test_recs);
      out.train = balls_to_dataset(train_recs, f.config);
      out.test = balls_to_dataset(test_recs, f.config);
    }
  } else if (type == "chess-mpp") {
    ChessFile f = read_chess_jsonl(path);
    std::vector<int> games;
    for (size_t i = 0; i < f.examples.size(); ++i) {
      const int g = i < f.game_of.size() ? f.game_of[i] : 0;
      if (games.empty() || games.back() != g) games.push_back(g);
    }
    Rng rng(seed ^ 0x5eedULL);
    shuffle_inplace(games, rng);
    const size_t n_test = std::max<size_t>(1, static_cast<size_t>(games.size() * test_fraction));
    std::unordered_set<int> test_games(games.begin(), games.begin() + static_cast<long>(n_test));
    std::vector<chess::MppExample> tr, te;
    std::vector<std::string> tr_ids, te_ids;
    for (size_t i = 0; i < f.examples.size(); ++i) {
      const int g = i < f.game_of.size() ? f.game_of[i] : 0;
      const bool is_test = test_games.count(g) != 0;
      (is_test ? te : tr).push_back(f.examples[i]);
      (is_test ? te_ids : tr_ids).push_back("g" + std::to_string(g) + ":i" + std::to_string(i));
    }
    out.train = chess_to_dataset(tr, tr_ids);
    out.test = chess_to_dataset(te, te_ids);
  } else if (type == "soccer") {
    SoccerFile f = read_soccer_jsonl(path);
    if (!test_path.empty()) {
      out.train = soccer_to_dataset(f.examples, "train");
      SoccerFile t = read_soccer_jsonl(test_path);
      out.test = soccer_to_dataset(t.examples, "test");
    } else {
      const size_t cut = static_cast<size_t>(f.examples.size() * (1.0 - test_fraction));
      std::vector<soccer::SoccerExample> tr(f.examples.begin(), f.examples.begin() + cut);
      std::vector<soccer::SoccerExample> te(f.examples.begin() + cut, f.examples.end());
      out.train = soccer_to_dataset(tr, "train");
      out.test = soccer_to_dataset(te, "test");
    }
  } else {
    throw DataError("unsupported dataset type: " + type);
  }
  if (out.train.ex.empty() || out.test.ex.empty()) throw DataError("empty split from " + path);
  return out;
}

json metrics_to_json(const TrainResult& r) {
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"lr", e.lr},
                      {"train_loss", e.train_loss},
                      {"test_loss", e.test_loss},
                      {"test_metric", e.test_metric}});
  }
  return {{"epochs", epochs},
          {"best_epoch", r.best_epoch},
          {"best_metric", r.best_metric},
          {"final_metric", r.final_metric},
          {"comm_evals", r.comm_evals},
          {"pair_evals", r.pair_evals}};
}

int cmd_gen_balls(int n_balls, double v0, double box, double radius, double dt, int traj, int steps,
                  uint64_t seed, const std::string& out) {
  balls::BallConfig config{box, radius, n_balls, v0, dt};
  auto records = balls::generate_dataset(config, traj, steps, seed);
  write_balls_jsonl(out, records, config, seed);
  Config resolved;
  resolved.set("n_balls", std::to_string(n_balls));
  resolved.set("v0", std::to_string(v0));
  resolved.set("box", std::to_string(box));
  resolved.set("radius", std::to_string(radius));
  resolved.set("dt", std::to_string(dt));
  resolved.set("traj", std::to_string(traj));
  resolved.set("steps", std::to_string(steps));
  resolved.set("seed", std::to_string(seed));
  write_manifest(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string(),
                 "gen-balls", resolved, {}, {out});
  std::cout << "wrote " << records.size() << " records to " << out << "\n";
  return kExitOk;
}

int cmd_prep_chess(const std::vector<std::string>& pgns, int max_ply, const std::string& out) {
  std::vector<chess::MppExample> examples;
  std::vector<int> game_of;
  int parsed = 0, discarded = 0;
  int game_index = 0;
  for (const std::string& path : pgns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open PGN: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    chess::PgnParseResult res = chess::parse_pgn(ss.str());
    discarded += static_cast<int>(res.errors.size());
    for (const auto& err : res.errors) std::cerr << "pgn: " << err << "\n";
    for (const auto& game : res.games) {
      try {
        const auto ex = chess::extract_examples(game, max_ply);
        for (const auto& e : ex) {
          examples.push_back(e);
          game_of.push_back(game_index);
        }
        ++parsed;
        ++game_index;
      } catch (const chess::ReplayError& e) {
        ++discarded;
        std::cerr << "pgn: game " << game_index << " discarded: " << e.what() << "\n";
      }
    }
  }
  write_chess_jsonl(out, examples, game_of, max_ply, parsed, discarded);
  Config resolved;
  resolved.set("max_ply", std::to_string(max_ply));
  write_manifest(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string(),
                 "prep-chess", resolved, pgns, {out});
  std::cout << "games parsed " << parsed << ", discarded " << discarded << ", examples "
            << examples.size() << " -> " << out << "\n";
  return kExitOk;
}

int cmd_prep_soccer(const std::vector<std::string>& csvs, double exclude_from, double exclude_to,
                    double max_jump, const std::string& out) {
  std::vector<soccer::SoccerExample> all;
  int64_t parsed = 0, skipped = 0;
  for (const std::string& path : csvs) {
    soccer::SvppLoadResult loaded = soccer::load_svpp(path);
    parsed += loaded.parsed;
    skipped += loaded.skipped;
    soccer::FrameSet frames = soccer::resample_2hz(loaded);
    soccer::FilterConfig fc;
    fc.max_jump_m = max_jump;
    if (exclude_from < exclude_to) {
      fc.exclude_from = exclude_from;
      fc.exclude_to = exclude_to;
    }
    const auto stats = soccer::filter_anomalies(frames, fc);
    auto ex = soccer::build_examples(frames);
    std::cout << path << ": frames " << frames.n_frames() << ", dropped_jump " << stats.dropped_jump
              << ", dropped_window " << stats.dropped_window << ", examples " << ex.size() << "\n";
    all.insert(all.end(), ex.begin(), ex.end());
  }
  write_soccer_jsonl(out, all, csvs.empty() ? "" : csvs.front());
  Config resolved;
  resolved.set("max_jump", std::to_string(max_jump));
  if (exclude_from < exclude_to) {
    resolved.set("exclude_from", std::to_string(exclude_from));
    resolved.set("exclude_to", std::to_string(exclude_to));
  }
  write_manifest(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path().string(),
                 "prep-soccer", resolved, csvs, {out});
  std::cout << "rows parsed " << parsed << ", skipped " << skipped << ", examples " << all.size()
            << " -> " << out << "\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& sets) {
  Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value: " + kv);
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const std::string data = cfg.get_str("data.train", "");
  if (data.empty()) throw std::invalid_argument("config needs data.train = <dataset.jsonl>");
  const std::string out_dir = cfg.get_str("out.dir", "run");
  const uint64_t seed = cfg.get_u64("seed", 0);

  LoadedTask t = load_and_split(data, cfg.get_str("data.test", ""),
                                cfg.get_num("data.test_fraction", 0.1), seed);
  ModelSpec spec = spec_from_config(cfg, t.task, t.train.feature_dim, t.train.out_dim);
  Model model(spec);

  TrainConfig tc;
  tc.epochs = cfg.get_int("train.epochs", 30);
  tc.batch_size = cfg.get_int("train.batch_size", 64);
  tc.lr = cfg.get_num("train.lr", 1e-3);
  tc.lr_halving_period = cfg.get_int("train.lr_halving_period", 10);
  tc.seed = seed;
  tc.higher_is_better = spec.head == Head::PerAgentSoftmax;
  tc.verbose = cfg.get_bool("train.verbose", false);

  TrainResult r = train_model(model, t.train, t.test, tc);

  fs::create_directories(out_dir);
  Model best(spec);
  best.load_flat(r.best_params);
  save_checkpoint(out_dir + "/model.ckpt", best);
  json report = metrics_to_json(r);
  report["task"] = t.task;
  report["arch"] = to_string(spec.arch);
  report["n_train"] = t.train.ex.size();
  report["n_test"] = t.test.ex.size();
  report["config_hash"] = cfg.hash_hex();
  {
    std::ofstream out(out_dir + "/report.json");
    out << report.dump(2) << "\n";
  }
  write_manifest(out_dir, "train", cfg, {data}, {out_dir + "/model.ckpt", out_dir + "/report.json"});
  std::cout << "best " << r.best_metric << " (epoch " << r.best_epoch << "), final "
            << r.final_metric << " -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& ckpt, const std::string& data, const std::string& out_path) {
  Model model = load_checkpoint(ckpt);
  const std::string type = sniff_dataset_type(data);
  Dataset ds;
  if (type == "balls") {
    BallsFile f = read_balls_jsonl(data);
    ds = balls_to_dataset(f.records, f.config);
  } else if (type == "chess-mpp") {
    ChessFile f = read_chess_jsonl(data);
    ds = chess_to_dataset(f.examples, {});
  } else if (type == "soccer") {
    SoccerFile f = read_soccer_jsonl(data);
    ds = soccer_to_dataset(f.examples, "eval");
  } else {
    throw DataError("unsupported dataset type: " + type);
  }
  json result = {{"checkpoint", ckpt}, {"data", data}, {"n", ds.ex.size()}};
  if (model.spec().head == Head::PerAgentSoftmax) {
    result["accuracy"] = evaluate_classification(model, ds);
  } else if (type == "soccer") {
    const auto horizons = evaluate_horizons(model, ds);
    result["horizons_m"] = horizons;
    result["mean_m"] = mean_of(horizons);
  } else {
    result["rms"] = evaluate_rms(model, ds);
  }
  std::cout << result.dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << result.dump(2) << "\n";
  }
  return kExitOk;
}

std::string attention_svg(const json& frame_dump, int target) {
  const auto& agents = frame_dump.at("agents");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300, wmax = 0.0;
  const auto& w = frame_dump.at("w");
  for (size_t j = 0; j < agents.size(); ++j) {
    xmin = std::min(xmin, agents[j].at("x").get<double>());
    xmax = std::max(xmax, agents[j].at("x").get<double>());
    ymin = std::min(ymin, agents[j].at("y").get<double>());
    ymax = std::max(ymax, agents[j].at("y").get<double>());
    wmax = std::max(wmax, w[target][j].get<double>());
  }
  const double pad = 1.0, size = 480.0;
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9}) + 2 * pad;
  auto X = [&](double x) { return (x - xmin + pad) / span * size; };
  auto Y = [&](double y) { return size - (y - ymin + pad) / span * size; };
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size << "'>\n";
  svg << "<rect width='100%' height='100%' fill='#102010'/>\n";
  for (size_t j = 0; j < agents.size(); ++j) {
    const double x = X(agents[j].at("x").get<double>());
    const double y = Y(agents[j].at("y").get<double>());
    const double vx = agents[j].value("vx", 0.0), vy = agents[j].value("vy", 0.0);
    const double weight = w[target][j].get<double>();
    const double bright = wmax > 0 ? weight / wmax : 0.0;
    const int green = 60 + static_cast<int>(bright * 195);
    const char* fill = static_cast<int>(j) == target ? "#4060ff" : nullptr;
    svg << "<line x1='" << x << "' y1='" << y << "' x2='" << x + vx * 12 << "' y2='"
        << y - vy * 12 << "' stroke='#cccccc' stroke-width='1'/>\n";
    if (fill) {
      svg << "<circle cx='" << x << "' cy='" << y << "' r='8' fill='" << fill << "'/>\n";
    } else {
      svg << "<circle cx='" << x << "' cy='" << y << "' r='8' fill='rgb(40," << green << ",40)'/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

int cmd_attention(const std::string& ckpt, const std::string& data,
                  const std::vector<int>& frame_indices, int target, bool svg,
                  const std::string& out_dir) {
  Model model = load_checkpoint(ckpt);
  if (model.spec().arch != Arch::Vain) {
    throw std::invalid_argument("attention export needs a vain checkpoint (got " +
                                to_string(model.spec().arch) + ")");
  }
  model.set_training(false);
  const std::string type = sniff_dataset_type(data);
  Dataset ds;
  if (type == "balls") {
    BallsFile f = read_balls_jsonl(data);
    ds = balls_to_dataset(f.records, f.config);
  } else if (type == "soccer") {
    SoccerFile f = read_soccer_jsonl(data);
    ds = soccer_to_dataset(f.examples, "attn");
  } else if (type == "chess-mpp") {
    ChessFile f = read_chess_jsonl(data);
    ds = chess_to_dataset(f.examples, {});
  } else {
    throw DataError("unsupported dataset type: " + type);
  }
  fs::create_directories(out_dir);
  for (int idx : frame_indices) {
    if (idx < 0 || idx >= static_cast<int>(ds.ex.size())) {
      throw DataError("frame index out of range: " + std::to_string(idx));
    }
    const Example& ex = ds.ex[idx];
    ModelOutput out = model.forward(ex.frame, nullptr);
    const std::vector<int> act = ex.frame.active_indices();
    json agents = json::array();
    for (int i : act) {
      json a = {{"x", ex.frame.features(i, 0)}, {"y", ex.frame.features(i, 1)}};
      if (ex.frame.feature_dim() >= 4) {
        a["vx"] = ex.frame.features(i, 2);
        a["vy"] = ex.frame.features(i, 3);
      }
      agents.push_back(std::move(a));
    }
    json wj = json::array();  // masked agents omitted
    for (int i : act) {
      json row = json::array();
      for (int j : act) row.push_back((*out.attention)(i, j));
      wj.push_back(std::move(row));
    }
    json dump = {{"frame", idx}, {"agents", std::move(agents)}, {"w", std::move(wj)}};
    const std::string base = out_dir + "/attention_" + std::to_string(idx);
    {
      std::ofstream o(base + ".json");
      o << dump.dump(2) << "\n";
    }
    if (svg) {
      const int tgt = std::min<int>(std::max(target, 0), static_cast<int>(act.size()) - 1);
      std::ofstream o(base + ".svg");
      o << attention_svg(dump, tgt);
    }
    std::cout << "frame " << idx << ": " << act.size() << " agents -> " << base << ".json\n";
  }
  return kExitOk;
}

int cmd_bench(const std::vector<int>& sizes, const std::string& out_path) {
  json rows = json::array();
  bool counts_ok = true;
  for (int n : sizes) {
    for (Arch arch : {Arch::Vain, Arch::CommNet, Arch::InteractionNet}) {
      ModelSpec spec = balls_spec(arch, 1, 32, 16);
      spec.psi_hidden = {16, 16};
      Model model(spec);
      model.set_training(false);
      Rng rng(17);
      Mat features(n, 4);
      for (double& v : features.data) v = next_uniform(rng, -1.0, 1.0);
      AgentFrame frame = AgentFrame::dense(std::move(features));
      model.forward(frame, nullptr);  // warm up
      model.reset_counters();
      const auto t0 = std::chrono::steady_clock::now();
      constexpr int reps = 20;
      for (int r = 0; r < reps; ++r) model.forward(frame, nullptr);
      const auto t1 = std::chrono::steady_clock::now();
      const double us =
          std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / double(reps);
      const EvalCounts expected = count_encoder_evals(spec, n);
      const int64_t comm = model.comm_evals() / reps;
      const int64_t pair = model.pair_evals() / reps;
      const bool ok = comm == expected.comm && pair == expected.pair;
      counts_ok = counts_ok && ok;
      rows.push_back({{"arch", to_string(arch)},
                      {"n", n},
                      {"comm_evals", comm},
                      {"pair_evals", pair},
                      {"expected_comm", expected.comm},
                      {"expected_pair", expected.pair},
                      {"forward_us", us},
                      {"counts_match", ok}});
      std::printf("%-8s n=%-4d comm=%-6lld pair=%-6lld forward=%.1fus %s\n", to_string(arch).c_str(),
                  n, static_cast<long long>(comm), static_cast<long long>(pair), us,
                  ok ? "ok" : "COUNT MISMATCH");
    }
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << json{{"rows", rows}}.dump(2) << "\n";
  }
  if (!counts_ok) {
    std::cerr << "encoder evaluation counts do not match the expected complexity\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_selfplay(int games, uint64_t seed, int max_plies, const std::string& out) {
  chess::SelfPlayConfig cfg;
  cfg.max_plies = max_plies;
  const auto gs = chess::selfplay_games(games, seed, cfg);
  std::ofstream o(out);
  if (!o) throw DataError("cannot open for writing: " + out);
  o << chess::write_pgn(gs);
  std::cout << "wrote " << gs.size() << " games to " << out << "\n";
  return kExitOk;
}

int cmd_gen_soccer_synth(int players, double duration, uint64_t seed, bool constant_velocity,
                         const std::string& out) {
  soccer::SyntheticConfig cfg;
  cfg.n_players = players;
  cfg.duration_s = duration;
  cfg.seed = seed;
  cfg.interacting = !constant_velocity;
  std::ofstream o(out);
  if (!o) throw DataError("cannot open for writing: " + out);
  o << soccer::synthetic_svpp_csv(cfg);
  std::cout << "wrote synthetic tracking CSV to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent interaction models: data, training, evaluation"};
  app.require_subcommand(1);

  // gen-balls
  auto* gen = app.add_subcommand("gen-balls", "generate a bouncing-ball dataset");
  int gb_n = 8, gb_traj = 250, gb_steps = 80;
  double gb_v0 = 3.0, gb_box = 10.0, gb_radius = 0.25, gb_dt = 0.1;
  uint64_t gb_seed = 0;
  std::string gb_out = "balls.jsonl";
  gen->add_option("--n-balls", gb_n, "balls per world (paper preset: 50)");
  gen->add_option("--v0", gb_v0, "max initial speed per component, m/s");
  gen->add_option("--box", gb_box, "container side, m");
  gen->add_option("--radius", gb_radius, "ball radius, m");
  gen->add_option("--dt", gb_dt, "time step, s");
  gen->add_option("--traj", gb_traj, "number of trajectories");
  gen->add_option("--steps", gb_steps, "steps per trajectory");
  gen->add_option("--seed", gb_seed, "rng seed");
  gen->add_option("--out", gb_out, "output jsonl path");

  // prep-chess
  auto* prep_c = app.add_subcommand("prep-chess", "extract next-mover examples from PGN");
  std::vector<std::string> pc_pgns;
  int pc_max_ply = 100;
  std::string pc_out = "chess.jsonl";
  prep_c->add_option("pgn", pc_pgns, "input PGN files")->required();
  prep_c->add_option("--max-ply", pc_max_ply, "drop moves later than this ply");
  prep_c->add_option("--out", pc_out, "output jsonl path");

  // prep-soccer
  auto* prep_s = app.add_subcommand("prep-soccer", "build position-prediction examples from tracking CSV");
  std::vector<std::string> ps_csvs;
  double ps_excl_from = 0, ps_excl_to = 0, ps_max_jump = 12.0;
  std::string ps_out = "soccer.jsonl";
  prep_s->add_option("csv", ps_csvs, "input tracking CSV files")->required();
  prep_s->add_option("--exclude-from", ps_excl_from, "drop frames from this time (s)");
  prep_s->add_option("--exclude-to", ps_excl_to, "drop frames before this time (s)");
  prep_s->add_option("--max-jump", ps_max_jump, "drop frames after a positional jump over this (m)");
  prep_s->add_option("--out", ps_out, "output jsonl path");

  // train / eval
  auto* train = app.add_subcommand("train", "train a model from a config file");
  std::string tr_config;
  std::vector<std::string> tr_sets;
  train->add_option("--config", tr_config, "key = value config file");
  train->add_option("--set", tr_sets, "override config entries (key=value)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_data, ev_out;
  eval->add_option("--checkpoint", ev_ckpt)->required();
  eval->add_option("--data", ev_data)->required();
  eval->add_option("--out", ev_out, "write the result JSON here too");

  // attention
  auto* attn = app.add_subcommand("attention", "dump attention maps for frames of a dataset");
  std::string at_ckpt, at_data, at_out = "attention";
  std::vector<int> at_frames = {0};
  int at_target = 0;
  bool at_svg = false;
  attn->add_option("--checkpoint", at_ckpt)->required();
  attn->add_option("--data", at_data)->required();
  attn->add_option("--frames", at_frames, "frame indices to dump");
  attn->add_option("--target", at_target, "highlighted agent for the svg");
  attn->add_flag("--svg", at_svg, "also write an svg scatter per frame");
  attn->add_option("--out", at_out, "output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "encoder-evaluation counts and forward timings");
  std::vector<int> be_sizes = {2, 8, 32};
  std::string be_out;
  bench->add_option("--n", be_sizes, "agent counts to sweep");
  bench->add_option("--out", be_out, "write a JSON report");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a named preset end to end");
  std::string ex_name, ex_out = "experiment", ex_chess;
  std::vector<std::string> ex_soccer;
  uint64_t ex_seed = 0;
  int ex_epochs = -1, ex_max_train = -1, ex_max_test = -1;
  bool ex_verbose = false;
  exp->add_option("name", ex_name, "balls-desk | balls-paper | chess-mpp | soccer-loo")->required();
  exp->add_option("--out", ex_out, "output directory");
  exp->add_option("--seed", ex_seed);
  exp->add_option("--chess-examples", ex_chess, "prep-chess output for chess-mpp");
  exp->add_option("--soccer", ex_soccer, "tracking CSVs for soccer-loo (repeat per dataset)");
  exp->add_option("--epochs", ex_epochs, "override preset epochs");
  exp->add_option("--max-train", ex_max_train, "cap training examples");
  exp->add_option("--max-test", ex_max_test, "cap test examples");
  exp->add_flag("--verbose", ex_verbose);

  // selfplay + synthetic soccer
  auto* sp = app.add_subcommand("selfplay", "generate legal games with a shallow greedy policy");
  int sp_games = 50, sp_plies = 100;
  uint64_t sp_seed = 0;
  std::string sp_out = "selfplay.pgn";
  sp->add_option("--games", sp_games);
  sp->add_option("--seed", sp_seed);
  sp->add_option("--max-plies", sp_plies);
  sp->add_option("--out", sp_out);

  auto* gsynth = app.add_subcommand("gen-soccer-synth", "synthetic tracking CSV for tests/demos");
  int gs_players = 11;
  double gs_duration = 120.0;
  uint64_t gs_seed = 7;
  bool gs_const = false;
  std::string gs_out = "synthetic.csv";
  gsynth->add_option("--players", gs_players);
  gsynth->add_option("--duration", gs_duration, "seconds");
  gsynth->add_option("--seed", gs_seed);
  gsynth->add_flag("--constant-velocity", gs_const, "exact constant-velocity tracks");
  gsynth->add_option("--out", gs_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_balls(gb_n, gb_v0, gb_box, gb_radius, gb_dt, gb_traj, gb_steps, gb_seed, gb_out);
    }
    if (prep_c->parsed()) return cmd_prep_chess(pc_pgns, pc_max_ply, pc_out);
    if (prep_s->parsed()) return cmd_prep_soccer(ps_csvs, ps_excl_from, ps_excl_to, ps_max_jump, ps_out);
    if (train->parsed()) return cmd_train(tr_config, tr_sets);
    if (eval->parsed()) return cmd_eval(ev_ckpt, ev_data, ev_out);
    if (attn->parsed()) return cmd_attention(at_ckpt, at_data, at_frames, at_target, at_svg, at_out);
    if (bench->parsed()) return cmd_bench(be_sizes, be_out);
    if (sp->parsed()) return cmd_selfplay(sp_games, sp_seed, sp_plies, sp_out);
    if (gsynth->parsed()) return cmd_gen_soccer_synth(gs_players, gs_duration, gs_seed, gs_const, gs_out);
    if (exp->parsed()) {
      ExperimentOptions opt;
      opt.out_dir = ex_out;
      opt.seed = ex_seed;
      opt.chess_examples = ex_chess;
      opt.soccer_files = ex_soccer;
      opt.epochs = ex_epochs;
      opt.max_train = ex_max_train;
      opt.max_test = ex_max_test;
      opt.verbose = ex_verbose;
      const json report = run_experiment(ex_name, opt);
      Config resolved;
      resolved.set("preset", ex_name);
      resolved.set("seed", std::to_string(ex_seed));
      if (ex_epochs > 0) resolved.set("epochs", std::to_string(ex_epochs));
      if (!ex_chess.empty()) resolved.set("chess_examples", ex_chess);
      std::vector<std::string> inputs = ex_soccer;
      if (!ex_chess.empty()) inputs.push_back(ex_chess);
      write_manifest(ex_out, "experiment", resolved, inputs, {ex_out + "/report.json"});
      std::cout << report.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const TrainDivergence& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
