// Python bindings for the core operations: frames and models, attention
// pooling, the ball simulator, and chess ingestion.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "vain/attention.hpp"
#include "vain/ballsim.hpp"
#include "vain/checkpoint.hpp"
#include "vain/chess_data.hpp"
#include "vain/chess_selfplay.hpp"
#include "vain/losses.hpp"
#include "vain/model.hpp"

namespace py = pybind11;
using namespace vain;

namespace {

using Rows = std::vector<std::vector<double>>;

Mat mat_from_rows(const Rows& rows) {
  if (rows.empty()) return Mat();
  Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int r = 0; r < m.rows; ++r) {
    if (rows[r].size() != static_cast<size_t>(m.cols)) {
      throw std::invalid_argument("ragged feature rows");
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r));
  }
  return m;
}

Rows rows_from_mat(const Mat& m) {
  Rows out(m.rows, std::vector<double>(m.cols));
  for (int r = 0; r < m.rows; ++r) std::copy(m.row(r), m.row(r) + m.cols, out[r].begin());
  return out;
}

AgentFrame frame_from(const Rows& features, const std::vector<int>& mask) {
  AgentFrame f;
  f.features = mat_from_rows(features);
  if (mask.empty()) {
    f.mask.assign(f.features.rows, 1);
  } else {
    f.mask.assign(mask.begin(), mask.end());
  }
  return f;
}

ModelSpec spec_from_json_str(const std::string& text) {
  return spec_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_vain, m) {
  m.doc() = "multi-agent interaction models: core operations";

  py::class_<Model>(m, "Model")
      .def(py::init([](const std::string& spec_json) { return Model(spec_from_json_str(spec_json)); }),
           py::arg("spec_json"))
      .def("forward",
           [](Model& self, const Rows& features, const std::vector<int>& mask) {
             ModelOutput out = self.forward(frame_from(features, mask), nullptr);
             py::dict d;
             d["per_agent"] = rows_from_mat(out.per_agent);
             if (out.probs) d["probs"] = *out.probs;
             if (out.attention) d["attention"] = rows_from_mat(*out.attention);
             return d;
           },
           py::arg("features"), py::arg("mask") = std::vector<int>{})
      .def("set_training", &Model::set_training)
      .def("save", [](const Model& self, const std::string& path) { save_checkpoint(path, self); })
      .def_property_readonly("comm_evals", &Model::comm_evals)
      .def_property_readonly("pair_evals", &Model::pair_evals)
      .def("reset_counters", &Model::reset_counters)
      .def_property_readonly("param_count", &Model::param_count)
      .def_property_readonly("spec_json",
                             [](const Model& self) { return spec_to_json(self.spec()).dump(); });

  m.def("load_model", [](const std::string& path) { return load_checkpoint(path); });

  m.def("count_encoder_evals", [](const std::string& spec_json, int n) {
    const EvalCounts c = count_encoder_evals(spec_from_json_str(spec_json), n);
    return py::make_tuple(c.comm, c.pair);
  });

  m.def(
      "attention_pool",
      [](const Rows& ecomm, const Rows& attn, const std::vector<int>& mask, const std::string& kernel) {
        std::vector<uint8_t> m8;
        if (mask.empty()) m8.assign(ecomm.size(), 1);
        else m8.assign(mask.begin(), mask.end());
        PoolResult r = attention_pool(mat_from_rows(ecomm), mat_from_rows(attn), m8,
                                      kernel_from_string(kernel));
        return py::make_tuple(rows_from_mat(r.pooled), rows_from_mat(r.w));
      },
      py::arg("ecomm"), py::arg("attn"), py::arg("mask") = std::vector<int>{},
      py::arg("kernel") = "softmax");

  m.def("softmax", [](const std::vector<double>& logits) { return softmax(logits, nullptr); });

  // Ball world.
  m.def(
      "generate_balls",
      [](int n_balls, int traj, int steps, uint64_t seed, double box, double radius, double dt,
         double v0) {
        balls::BallConfig cfg{box, radius, n_balls, v0, dt};
        const auto records = balls::generate_dataset(cfg, traj, steps, seed);
        py::list out;
        for (const auto& rec : records) {
          py::dict d;
          d["traj"] = rec.traj;
          d["t"] = rec.t;
          py::list bl;
          for (const auto& b : rec.balls) {
            py::dict bd;
            bd["x"] = b.x;
            bd["y"] = b.y;
            bd["vx"] = b.vx;
            bd["vy"] = b.vy;
            bd["dx"] = b.dx;
            bd["dy"] = b.dy;
            bd["dvx"] = b.dvx;
            bd["dvy"] = b.dvy;
            bl.append(bd);
          }
          d["balls"] = bl;
          out.append(d);
        }
        return out;
      },
      py::arg("n_balls") = 8, py::arg("traj") = 1, py::arg("steps") = 10, py::arg("seed") = 0,
      py::arg("box") = 10.0, py::arg("radius") = 0.25, py::arg("dt") = 0.1, py::arg("v0") = 3.0);

  // Chess ingestion.
  m.def("perft", [](int depth, const std::string& fen) {
    const chess::Board b = fen.empty() ? chess::Board::initial() : chess::Board::from_fen(fen);
    return chess::perft(b, depth);
  }, py::arg("depth"), py::arg("fen") = "");

  m.def("parse_pgn", [](const std::string& text) {
    const chess::PgnParseResult res = chess::parse_pgn(text);
    py::list games;
    for (const auto& g : res.games) {
      py::dict d;
      py::dict tags;
      for (const auto& [k, v] : g.tags) tags[py::str(k)] = v;
      d["tags"] = tags;
      d["moves"] = g.sans;
      d["result"] = g.result;
      games.append(d);
    }
    return py::make_tuple(games, res.errors);
  });

  m.def(
      "extract_mpp",
      [](const std::vector<std::string>& sans, int max_ply) {
        chess::PgnGame g;
        g.sans = sans;
        const auto examples = chess::extract_examples(g, max_ply);
        py::list out;
        for (const auto& ex : examples) {
          py::dict d;
          py::list slots;
          for (const auto& s : ex.slots) slots.append(py::make_tuple(s[0], s[1], s[2]));
          d["slots"] = slots;
          d["label"] = ex.label;
          out.append(d);
        }
        return out;
      },
      py::arg("sans"), py::arg("max_ply") = 100);

  m.def("selfplay_pgn", [](int games, uint64_t seed, int max_plies) {
    chess::SelfPlayConfig cfg;
    cfg.max_plies = max_plies;
    return chess::write_pgn(chess::selfplay_games(games, seed, cfg));
  }, py::arg("games") = 1, py::arg("seed") = 0, py::arg("max_plies") = 100);

  m.attr("__version__") = "0.1.0";
}
