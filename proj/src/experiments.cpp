#include "vain/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_set>

#include "vain/checkpoint.hpp"
#include "vain/configfile.hpp"
#include "vain/rng.hpp"

namespace vain {

using json = nlohmann::json;

ModelSpec balls_spec(Arch arch, uint64_t seed, int hidden, int enc_out) {
  ModelSpec s;
  s.arch = arch;
  s.feature_dim = 4;
  s.es_hidden = {hidden, hidden};
  s.es_out = enc_out;
  s.ec_hidden = {hidden, hidden};
  s.comm_dim = enc_out;
  s.attn_dim = 10;
  s.psi_hidden = {hidden, hidden};  // shrunk afterwards for compute parity
  s.dec_hidden = {hidden, hidden};
  s.out_dim = 4;
  s.head = Head::Regression;
  s.kernel = arch == Arch::Vain ? Kernel::Unnormalized : Kernel::Softmax;
  s.aggregation = Agg::Sum;  // additive physics
  s.batchnorm = false;
  s.seed = seed;
  return s;
}

ModelSpec chess_spec(Arch arch, uint64_t seed, int width) {
  ModelSpec s;
  s.arch = arch;
  s.feature_dim = chess::kMppFeatureDim;
  s.n_slots = chess::kMppSlots;
  s.es_hidden = {width, width};
  s.es_out = width;
  s.ec_hidden = {width, width};
  s.comm_dim = width;
  s.attn_dim = 10;
  s.psi_hidden = {width / 4, width / 4};  // 4x narrower pairwise net
  s.dec_hidden = {width, width};
  s.out_dim = 1;
  s.head = Head::PerAgentSoftmax;
  s.kernel = Kernel::Softmax;
  s.aggregation = Agg::Mean;
  s.batchnorm = arch == Arch::Vain || arch == Arch::InteractionNet;
  s.absent_flag_index = chess::kMppAbsentBit;
  s.seed = seed;
  if (arch == Arch::Fc) {
    s.dec_hidden = {64, 64};  // flat one-hot in, 64, 64, 32-way out
    s.batchnorm = false;
  }
  return s;
}

ModelSpec soccer_spec(Arch arch, uint64_t seed, int hidden, int enc_out) {
  ModelSpec s;
  s.arch = arch;
  s.feature_dim = soccer::kSoccerFeatures;
  s.es_hidden = {hidden, hidden};
  s.es_out = enc_out;
  s.ec_hidden = {hidden, hidden};
  s.comm_dim = enc_out;
  s.attn_dim = 10;
  s.psi_hidden = {hidden, hidden};  // same widths as the comm encoder
  s.dec_hidden = {hidden, hidden};
  s.out_dim = 2 * soccer::kHorizons;
  s.head = Head::Regression;
  s.kernel = Kernel::Softmax;
  s.aggregation = Agg::Mean;
  s.batchnorm = arch == Arch::InteractionNet;
  s.seed = seed;
  if (arch == Arch::Mlp) {
    s.dec_hidden = {256, 256};  // PAD: 256, 256, 16
    s.batchnorm = false;
  }
  if (arch == Arch::Linear) s.dec_hidden = {};
  return s;
}

size_t mlp_macs(int in, const std::vector<int>& hidden, int out) {
  size_t total = 0;
  int prev = in;
  for (int h : hidden) {
    total += static_cast<size_t>(prev) * h;
    prev = h;
  }
  total += static_cast<size_t>(prev) * out;
  return total;
}

int parity_psi_hidden(const ModelSpec& vain, const ModelSpec& in_spec, int n) {
  const size_t vain_macs =
      static_cast<size_t>(n) * (mlp_macs(vain.feature_dim, vain.es_hidden, vain.es_out) +
                                mlp_macs(vain.feature_dim, vain.ec_hidden, vain.comm_dim + vain.attn_dim) +
                                mlp_macs(vain.comm_dim + vain.es_out, vain.dec_hidden, vain.out_dim));
  const size_t fixed =
      static_cast<size_t>(n) * (mlp_macs(in_spec.feature_dim, in_spec.es_hidden, in_spec.es_out) +
                                mlp_macs(in_spec.comm_dim + in_spec.es_out, in_spec.dec_hidden,
                                         in_spec.out_dim));
  const size_t pairs = static_cast<size_t>(n) * (n - 1);
  int best = 1;
  double best_err = 1e300;
  for (int h = 1; h <= 512; ++h) {
    std::vector<int> hid(in_spec.psi_hidden.size(), h);
    const size_t total = fixed + pairs * mlp_macs(2 * in_spec.feature_dim, hid, in_spec.comm_dim);
    const double err = std::abs(static_cast<double>(total) - static_cast<double>(vain_macs)) /
                       static_cast<double>(vain_macs);
    if (err < best_err) {
      best_err = err;
      best = h;
    }
  }
  return best;
}

double rand_baseline_accuracy(const Dataset& data, uint64_t seed) {
  Rng rng(seed);
  int correct = 0;
  for (const Example& ex : data.ex) {
    const std::vector<int> act = ex.frame.active_indices();
    const int pick = act[static_cast<size_t>(next_below(rng, act.size()))];
    if (pick == ex.label) ++correct;
  }
  return data.ex.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.ex.size());
}

namespace {

json train_and_report(Model& model, const Dataset& train, const Dataset& test, TrainConfig cfg,
                      const std::string& out_dir, const std::string& method) {
  cfg.higher_is_better = model.spec().head == Head::PerAgentSoftmax;
  TrainResult r = train_model(model, train, test, cfg);
  json entry = {{"metric", r.best_metric},
                {"final_metric", r.final_metric},
                {"best_epoch", r.best_epoch},
                {"comm_evals", r.comm_evals},
                {"pair_evals", r.pair_evals},
                {"params", model.param_count()}};
  if (!out_dir.empty()) {
    Model best(model.spec());
    best.load_flat(r.best_params);
    save_checkpoint(out_dir + "/" + method + ".ckpt", best);
  }
  return entry;
}

void write_report(const std::string& out_dir, const json& report) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/report.json");
  out << report.dump(2) << "\n";
}

json run_balls(bool paper_scale, const ExperimentOptions& opt) {
  balls::BallConfig config;
  config.n_balls = paper_scale ? 50 : 8;
  config.radius = 0.8;  // dense enough that ball-ball contact dominates the error
  const int hidden = paper_scale ? 256 : 64;
  const int enc_out = paper_scale ? 128 : 32;
  const int train_traj = paper_scale ? 500 : 250;
  const int test_traj = paper_scale ? 100 : 50;
  const int steps = paper_scale ? 100 : 80;
  const int epochs = opt.epochs > 0 ? opt.epochs : (paper_scale ? 60 : 24);

  auto records = balls::generate_dataset(config, train_traj + test_traj, steps, opt.seed);
  std::vector<balls::BallRecord> train_recs, test_recs;
  split_by_trajectory(records, test_traj, train_recs, test_recs);
  if (opt.max_train > 0 && static_cast<int>(train_recs.size()) > opt.max_train) {
    train_recs.resize(opt.max_train);
  }
  if (opt.max_test > 0 && static_cast<int>(test_recs.size()) > opt.max_test) {
    test_recs.resize(opt.max_test);
  }
  Dataset train = balls_to_dataset(train_recs, config);
  Dataset test = balls_to_dataset(test_recs, config);

  TrainConfig tc;
  tc.epochs = epochs;
  tc.seed = opt.seed;
  tc.verbose = opt.verbose;

  json methods;
  methods["vel0"] = {{"metric", balls_baseline_rms(test_recs, config, BallBaseline::Vel0)}};
  methods["vel-const"] = {{"metric", balls_baseline_rms(test_recs, config, BallBaseline::VelConst)}};

  const ModelSpec vain = balls_spec(Arch::Vain, opt.seed, hidden, enc_out);
  ModelSpec in_spec = balls_spec(Arch::InteractionNet, opt.seed, hidden, enc_out);
  const int psi_h = parity_psi_hidden(vain, in_spec, config.n_balls);
  in_spec.psi_hidden = {psi_h, psi_h};

  for (const auto& [name, spec] :
       std::vector<std::pair<std::string, ModelSpec>>{{"commnet", balls_spec(Arch::CommNet, opt.seed, hidden, enc_out)},
                                                      {"in", in_spec},
                                                      {"vain", vain}}) {
    Model model(spec);
    methods[name] = train_and_report(model, train, test, tc, opt.out_dir, name);
  }
  methods["in"]["psi_hidden"] = psi_h;

  json report = {{"preset", paper_scale ? "balls-paper" : "balls-desk"},
                 {"seed", opt.seed},
                 {"metric", "rms"},
                 {"n_train", train.ex.size()},
                 {"n_test", test.ex.size()},
                 {"config",
                  {{"n_balls", config.n_balls},
                   {"box_size", config.box_size},
                   {"radius", config.radius},
                   {"dt", config.dt},
                   {"v0", config.v0},
                   {"hidden", hidden},
                   {"epochs", epochs}}},
                 {"methods", methods}};
  write_report(opt.out_dir, report);
  return report;
}

json run_chess(const ExperimentOptions& opt) {
  if (opt.chess_examples.empty()) {
    throw DataError(
        "chess-mpp needs an examples file. Acquire games (e.g. the FICS games database, "
        "standard rated games, PGN export), run `vain prep-chess <pgn> --out examples.jsonl`, "
        "then pass --chess-examples examples.jsonl");
  }
  ChessFile file = read_chess_jsonl(opt.chess_examples);
  if (file.examples.empty()) throw DataError("no examples in " + opt.chess_examples);

  // Deterministic 90/10 split by game, never inside one.
  std::vector<int> game_ids;
  for (size_t i = 0; i < file.examples.size(); ++i) {
    const int g = i < file.game_of.size() ? file.game_of[i] : 0;
    if (game_ids.empty() || game_ids.back() != g) game_ids.push_back(g);
  }
  std::vector<int> game_order = game_ids;
  Rng rng(opt.seed ^ 0x5eedULL);
  shuffle_inplace(game_order, rng);
  const size_t n_test_games = std::max<size_t>(1, game_order.size() / 10);
  std::unordered_set<int> test_games(game_order.begin(),
                                     game_order.begin() + static_cast<long>(n_test_games));

  std::vector<chess::MppExample> train_ex, test_ex;
  std::vector<std::string> train_ids, test_ids;
  for (size_t i = 0; i < file.examples.size(); ++i) {
    const int g = i < file.game_of.size() ? file.game_of[i] : 0;
    const bool is_test = test_games.count(g) != 0;
    (is_test ? test_ex : train_ex).push_back(file.examples[i]);
    (is_test ? test_ids : train_ids).push_back("g" + std::to_string(g) + ":i" + std::to_string(i));
  }
  if (opt.max_train > 0 && static_cast<int>(train_ex.size()) > opt.max_train) {
    train_ex.resize(opt.max_train);
    train_ids.resize(opt.max_train);
  }
  if (opt.max_test > 0 && static_cast<int>(test_ex.size()) > opt.max_test) {
    test_ex.resize(opt.max_test);
    test_ids.resize(opt.max_test);
  }
  Dataset train = chess_to_dataset(train_ex, train_ids);
  Dataset test = chess_to_dataset(test_ex, test_ids);

  TrainConfig tc;
  tc.epochs = opt.epochs > 0 ? opt.epochs : 10;
  tc.seed = opt.seed;
  tc.verbose = opt.verbose;
  tc.higher_is_better = true;

  json methods;
  methods["rand"] = {{"metric", rand_baseline_accuracy(test, opt.seed + 1)}};
  for (Arch arch : {Arch::Fc, Arch::SMax, Arch::OneHopFc, Arch::CommNet, Arch::InteractionNet,
                    Arch::Vain}) {
    Model model(chess_spec(arch, opt.seed));
    methods[to_string(arch)] = train_and_report(model, train, test, tc, opt.out_dir, to_string(arch));
  }

  json report = {{"preset", "chess-mpp"},
                 {"seed", opt.seed},
                 {"metric", "accuracy"},
                 {"n_games", game_order.size()},
                 {"n_train", train.ex.size()},
                 {"n_test", test.ex.size()},
                 {"config", {{"width", 64}, {"epochs", tc.epochs}, {"max_ply", file.max_ply}}},
                 {"methods", methods}};
  write_report(opt.out_dir, report);
  return report;
}

json run_soccer(const ExperimentOptions& opt) {
  if (opt.soccer_files.size() < 2) {
    throw DataError(
        "soccer-loo needs >= 2 tracking CSV files (one per match half). Acquire the Soccer "
        "Video and Player Position dataset (Alfheim / Tromso IL 2013 sensor logs; files such "
        "as 2013-11-03, 2013-11-07), then pass --soccer <csv> once per dataset");
  }
  struct Part {
    std::string id;
    std::vector<soccer::SoccerExample> raw;
    Dataset data;
  };
  std::vector<Part> parts;
  for (const std::string& path : opt.soccer_files) {
    Part part;
    part.id = std::filesystem::path(path).stem().string();
    soccer::SvppLoadResult loaded = soccer::load_svpp(path);
    soccer::FrameSet frames = soccer::resample_2hz(loaded);
    soccer::filter_anomalies(frames, {});
    part.raw = soccer::build_examples(frames);
    if (part.raw.empty()) throw DataError("no usable examples in " + path);
    if (opt.max_test > 0 && static_cast<int>(part.raw.size()) > opt.max_test) {
      part.raw.resize(opt.max_test);
    }
    part.data = soccer_to_dataset(part.raw, part.id);
    parts.push_back(std::move(part));
  }

  TrainConfig tc;
  tc.epochs = opt.epochs > 0 ? opt.epochs : 12;
  tc.seed = opt.seed;
  tc.verbose = opt.verbose;

  const std::vector<std::string> methods_order = {"static", "palv", "palaf", "pad",
                                                  "in",     "commnet", "vain"};
  json per_method;
  for (const std::string& m : methods_order) per_method[m] = {{"per_dataset", json::object()}};

  for (size_t held = 0; held < parts.size(); ++held) {
    std::vector<soccer::SoccerExample> train_raw;
    Dataset train;
    train.kind = TaskKind::Soccer;
    train.feature_dim = soccer::kSoccerFeatures;
    train.out_dim = 2 * soccer::kHorizons;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i == held) continue;
      train_raw.insert(train_raw.end(), parts[i].raw.begin(), parts[i].raw.end());
      train.ex.insert(train.ex.end(), parts[i].data.ex.begin(), parts[i].data.ex.end());
    }
    if (opt.max_train > 0 && static_cast<int>(train.ex.size()) > opt.max_train) {
      train.ex.resize(opt.max_train);
      train_raw.resize(opt.max_train);
    }
    const Part& test = parts[held];

    auto put = [&](const std::string& method, const std::vector<double>& horizons) {
      per_method[method]["per_dataset"][test.id] = {{"horizons", horizons},
                                                    {"mean", mean_of(horizons)}};
    };

    // Closed-form and fitted baselines evaluate on raw features.
    std::vector<Mat> preds;
    preds.reserve(test.raw.size());
    for (const auto& ex : test.raw) preds.push_back(soccer::baseline_predict(ex, soccer::BaselineKind::Static));
    put("static", soccer_prediction_horizons(test.raw, preds));
    preds.clear();
    for (const auto& ex : test.raw) preds.push_back(soccer::baseline_predict(ex, soccer::BaselineKind::Palv));
    put("palv", soccer_prediction_horizons(test.raw, preds));
    const soccer::PalafModel palaf = soccer::fit_palaf(train_raw);
    preds.clear();
    for (const auto& ex : test.raw) {
      preds.push_back(soccer::baseline_predict(ex, soccer::BaselineKind::Palaf, &palaf));
    }
    put("palaf", soccer_prediction_horizons(test.raw, preds));

    for (const auto& [name, arch] : std::vector<std::pair<std::string, Arch>>{
             {"pad", Arch::Mlp}, {"in", Arch::InteractionNet}, {"commnet", Arch::CommNet},
             {"vain", Arch::Vain}}) {
      Model model(soccer_spec(arch, opt.seed, opt.soccer_hidden, opt.soccer_enc_out));
      TrainConfig cfg = tc;
      cfg.higher_is_better = false;
      TrainResult r = train_model(model, train, test.data, cfg);
      Model best(model.spec());
      best.load_flat(r.best_params);
      put(name, evaluate_horizons(best, test.data));
      if (!opt.out_dir.empty()) {
        save_checkpoint(opt.out_dir + "/" + name + "-" + test.id + ".ckpt", best);
      }
    }
  }

  // Grand mean per method across datasets (mean of per-dataset means).
  for (const std::string& m : methods_order) {
    double acc = 0.0;
    int n = 0;
    for (const auto& [id, entry] : per_method[m]["per_dataset"].items()) {
      acc += entry["mean"].get<double>();
      ++n;
    }
    per_method[m]["mean"] = n ? acc / n : 0.0;
  }

  json report = {{"preset", "soccer-loo"},
                 {"seed", opt.seed},
                 {"metric", "mean_euclidean_m"},
                 {"datasets", json::array()},
                 {"config", {{"epochs", tc.epochs}, {"hidden", opt.soccer_hidden}}},
                 {"methods", per_method}};
  for (const Part& p : parts) report["datasets"].push_back(p.id);
  write_report(opt.out_dir, report);
  return report;
}

}  // namespace

json run_experiment(const std::string& preset, const ExperimentOptions& opt) {
  if (!opt.out_dir.empty()) std::filesystem::create_directories(opt.out_dir);
  if (preset == "balls-desk") return run_balls(false, opt);
  if (preset == "balls-paper") return run_balls(true, opt);
  if (preset == "chess-mpp") return run_chess(opt);
  if (preset == "soccer-loo") return run_soccer(opt);
  throw std::invalid_argument("unknown preset: " + preset +
                              " (expected balls-desk, balls-paper, chess-mpp, soccer-loo)");
}

}  // namespace vain
