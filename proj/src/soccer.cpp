#include "vain/soccer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vain/rng.hpp"

namespace vain::soccer {

namespace {

constexpr double kGrid = 0.5;
constexpr double kTol = 0.025;  // half a 20 Hz period
constexpr double kBoundLimit = 1000.0;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Either float seconds or "YYYY-MM-DD HH:MM:SS.ff" (seconds since midnight).
std::optional<double> parse_time(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  if (s.find(':') != std::string::npos) {
    const size_t sp = s.find(' ');
    const std::string clock = sp == std::string::npos ? s : s.substr(sp + 1);
    int h = 0, m = 0;
    double sec = 0;
    if (std::sscanf(clock.c_str(), "%d:%d:%lf", &h, &m, &sec) != 3) return std::nullopt;
    return h * 3600.0 + m * 60.0 + sec;
  }
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<double> parse_num(const std::string& raw) {
  const std::string s = trim(raw);
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

struct ColumnMap {
  int time = -1, id = -1, x = -1, y = -1, heading = -1, speed = -1;
  bool complete() const { return time >= 0 && id >= 0 && x >= 0 && y >= 0; }
};

std::optional<ColumnMap> map_header(const std::vector<std::string>& cols) {
  ColumnMap m;
  for (size_t i = 0; i < cols.size(); ++i) {
    std::string c = trim(cols[i]);
    std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::tolower(ch); });
    const int idx = static_cast<int>(i);
    if (c == "time" || c == "timestamp") m.time = idx;
    else if (c == "id" || c == "tag_id" || c == "player_id") m.id = idx;
    else if (c == "x" || c == "x_pos") m.x = idx;
    else if (c == "y" || c == "y_pos") m.y = idx;
    else if (c == "heading") m.heading = idx;
    else if (c == "speed") m.speed = idx;
  }
  if (!m.complete()) return std::nullopt;
  return m;
}

ColumnMap positional_map() {
  // timestamp, tag_id, x_pos, y_pos, heading, direction, energy, speed, ...
  ColumnMap m;
  m.time = 0;
  m.id = 1;
  m.x = 2;
  m.y = 3;
  m.heading = 4;
  m.speed = 7;
  return m;
}

}  // namespace

SvppLoadResult load_svpp_text(const std::string& csv) {
  SvppLoadResult out;
  std::istringstream in(csv);
  std::string line;
  ColumnMap cmap;
  bool have_map = false;
  bool first_content = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cols = split_csv(line);
    if (first_content) {
      first_content = false;
      if (auto header = map_header(cols)) {
        cmap = *header;
        have_map = true;
        continue;  // header row consumed
      }
      cmap = positional_map();
      have_map = true;
      if (cols.size() < 4) throw std::runtime_error("load_svpp: unrecognized column layout");
      // fall through: first line is data
    }
    const int need = std::max({cmap.time, cmap.id, cmap.x, cmap.y});
    if (static_cast<int>(cols.size()) <= need) {
      ++out.skipped;
      continue;
    }
    const auto t = parse_time(cols[cmap.time]);
    const auto id = parse_num(cols[cmap.id]);
    const auto x = parse_num(cols[cmap.x]);
    const auto y = parse_num(cols[cmap.y]);
    if (!t || !id || !x || !y || std::abs(*x) > kBoundLimit || std::abs(*y) > kBoundLimit) {
      ++out.skipped;
      continue;
    }
    PlayerSample s;
    s.t = *t;
    s.player_id = static_cast<int>(*id);
    s.x = *x;
    s.y = *y;
    if (cmap.heading >= 0 && static_cast<int>(cols.size()) > cmap.heading) {
      s.heading = parse_num(cols[cmap.heading]).value_or(0.0);
    }
    if (cmap.speed >= 0 && static_cast<int>(cols.size()) > cmap.speed) {
      s.speed = parse_num(cols[cmap.speed]).value_or(0.0);
    }
    out.streams[s.player_id].push_back(s);
    ++out.parsed;
  }
  (void)have_map;
  for (auto& [id, v] : out.streams) {
    std::stable_sort(v.begin(), v.end(),
                     [](const PlayerSample& a, const PlayerSample& b) { return a.t < b.t; });
  }
  return out;
}

SvppLoadResult load_svpp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_svpp: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_svpp_text(ss.str());
}

FrameSet resample_2hz(const SvppLoadResult& in) {
  FrameSet out;
  for (const auto& [id, v] : in.streams) {
    if (!v.empty()) out.player_ids.push_back(id);
  }
  if (out.player_ids.empty()) return out;

  double tmin = 1e300, tmax = -1e300;
  for (const auto& [id, v] : in.streams) {
    if (v.empty()) continue;
    tmin = std::min(tmin, v.front().t);
    tmax = std::max(tmax, v.back().t);
  }
  const int64_t g0 = static_cast<int64_t>(std::ceil((tmin - kTol) / kGrid));
  const int64_t g1 = static_cast<int64_t>(std::floor((tmax + kTol) / kGrid));
  if (g1 < g0) return out;

  const int np = out.n_players();
  out.times.resize(g1 - g0 + 1);
  out.state.assign(out.times.size(), std::vector<std::optional<PlayerState>>(np));
  for (size_t k = 0; k < out.times.size(); ++k) out.times[k] = static_cast<double>(g0 + static_cast<int64_t>(k)) * kGrid;

  for (int p = 0; p < np; ++p) {
    const auto& stream = in.streams.at(out.player_ids[p]);
    auto find_at = [&](double t) -> const PlayerSample* {
      auto it = std::lower_bound(stream.begin(), stream.end(), t - kTol,
                                 [](const PlayerSample& s, double v) { return s.t < v; });
      if (it != stream.end() && std::abs(it->t - t) <= kTol) return &*it;
      return nullptr;
    };
    for (size_t k = 0; k < out.times.size(); ++k) {
      const double t = out.times[k];
      const PlayerSample* now = find_at(t);
      if (!now) continue;
      const PlayerSample* prev = find_at(t - kGrid);
      if (!prev) continue;  // velocity undefined; leave a gap
      PlayerState st;
      st.x = now->x;
      st.y = now->y;
      st.vx = (now->x - prev->x) / kGrid;
      st.vy = (now->y - prev->y) / kGrid;
      st.heading = now->heading;
      st.speed = now->speed;
      out.state[k][p] = st;
    }
  }
  out.complete.assign(out.times.size(), 0);
  for (size_t k = 0; k < out.times.size(); ++k) {
    bool all = true;
    for (int p = 0; p < np; ++p) {
      if (!out.state[k][p]) {
        all = false;
        break;
      }
    }
    out.complete[k] = all ? 1 : 0;
  }
  return out;
}

FilterStats filter_anomalies(FrameSet& frames, const FilterConfig& cfg) {
  FilterStats stats;
  const int np = frames.n_players();
  if (cfg.exclude_from && cfg.exclude_to) {
    for (int k = 0; k < frames.n_frames(); ++k) {
      if (frames.times[k] >= *cfg.exclude_from && frames.times[k] < *cfg.exclude_to &&
          frames.complete[k]) {
        frames.complete[k] = 0;
        ++stats.dropped_window;
      }
    }
  }
  // Jump check runs on the raw adjacent frames, then drops the landing frame.
  std::vector<uint8_t> drop(frames.n_frames(), 0);
  for (int k = 1; k < frames.n_frames(); ++k) {
    if (!frames.complete[k] || !frames.complete[k - 1]) continue;
    for (int p = 0; p < np; ++p) {
      const auto& a = *frames.state[k - 1][p];
      const auto& b = *frames.state[k][p];
      const double d = std::hypot(b.x - a.x, b.y - a.y);
      if (d > cfg.max_jump_m) {
        drop[k] = 1;
        break;
      }
    }
  }
  for (int k = 0; k < frames.n_frames(); ++k) {
    if (drop[k]) {
      frames.complete[k] = 0;
      ++stats.dropped_jump;
    }
  }
  return stats;
}

std::vector<SoccerExample> build_examples(const FrameSet& frames) {
  std::vector<SoccerExample> out;
  const int np = frames.n_players();
  for (int k = 0; k + kHorizons < frames.n_frames(); ++k) {
    bool ok = true;
    for (int j = 0; j <= kHorizons; ++j) {
      if (!frames.complete[k + j]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    SoccerExample ex;
    ex.t = frames.times[k];
    ex.player_ids = frames.player_ids;
    ex.features = Mat(np, kSoccerFeatures);
    ex.targets = Mat(np, 2 * kHorizons);
    for (int p = 0; p < np; ++p) {
      const auto& st = *frames.state[k][p];
      ex.features(p, 0) = st.x;
      ex.features(p, 1) = st.y;
      ex.features(p, 2) = st.vx;
      ex.features(p, 3) = st.vy;
      ex.features(p, 4) = std::cos(st.heading);
      ex.features(p, 5) = std::sin(st.heading);
      ex.features(p, 6) = st.speed;
      for (int j = 1; j <= kHorizons; ++j) {
        const auto& fut = *frames.state[k + j][p];
        ex.targets(p, 2 * (j - 1)) = fut.x - st.x;
        ex.targets(p, 2 * (j - 1) + 1) = fut.y - st.y;
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

// Symmetric positive definite solve, plain Gaussian elimination with partial
// pivoting; systems here are 8x8.
std::vector<double> solve_linear(Mat a, std::vector<double> b) {
  const int n = a.rows;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    const double d = a(col, col);
    if (d == 0.0) throw std::runtime_error("solve_linear: singular system");
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / d;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
    x[r] = acc / a(r, r);
  }
  return x;
}

void palaf_features(const SoccerExample& ex, int p, double* f) {
  for (int c = 0; c < kSoccerFeatures; ++c) f[c] = ex.features(p, c);
  f[kSoccerFeatures] = 1.0;
}

}  // namespace

PalafModel fit_palaf(const std::vector<SoccerExample>& train) {
  constexpr int d = kSoccerFeatures + 1;
  Mat xtx(d, d);
  Mat xty(d, 2 * kHorizons);
  double f[d];
  for (const SoccerExample& ex : train) {
    for (int p = 0; p < ex.features.rows; ++p) {
      palaf_features(ex, p, f);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) xtx(a, b) += f[a] * f[b];
        for (int h = 0; h < 2 * kHorizons; ++h) xty(a, h) += f[a] * ex.targets(p, h);
      }
    }
  }
  for (int a = 0; a < d; ++a) xtx(a, a) += 1e-9;  // ridge for degenerate inputs
  PalafModel model;
  model.coef = Mat(2 * kHorizons, d);
  for (int h = 0; h < 2 * kHorizons; ++h) {
    std::vector<double> rhs(d);
    for (int a = 0; a < d; ++a) rhs[a] = xty(a, h);
    const std::vector<double> beta = solve_linear(xtx, rhs);
    for (int a = 0; a < d; ++a) model.coef(h, a) = beta[a];
  }
  model.fitted = true;
  return model;
}

Mat baseline_predict(const SoccerExample& ex, BaselineKind kind, const PalafModel* palaf) {
  const int np = ex.features.rows;
  Mat pred(np, 2 * kHorizons);
  switch (kind) {
    case BaselineKind::Static:
      break;  // zero displacement
    case BaselineKind::Palv:
      for (int p = 0; p < np; ++p) {
        const double vx = ex.features(p, 2), vy = ex.features(p, 3);
        for (int j = 1; j <= kHorizons; ++j) {
          const double h = 0.5 * j;
          pred(p, 2 * (j - 1)) = vx * h;
          pred(p, 2 * (j - 1) + 1) = vy * h;
        }
      }
      break;
    case BaselineKind::Palaf: {
      if (!palaf || !palaf->fitted) throw std::invalid_argument("baseline_predict: palaf not fitted");
      constexpr int d = kSoccerFeatures + 1;
      double f[d];
      for (int p = 0; p < np; ++p) {
        palaf_features(ex, p, f);
        for (int h = 0; h < 2 * kHorizons; ++h) {
          double acc = 0.0;
          for (int a = 0; a < d; ++a) acc += palaf->coef(h, a) * f[a];
          pred(p, h) = acc;
        }
      }
      break;
    }
    case BaselineKind::Pad:
      throw std::invalid_argument("baseline_predict: PAD is a trained model, use the trainer");
  }
  return pred;
}

std::string synthetic_svpp_csv(const SyntheticConfig& cfg) {
  std::ostringstream out;
  out << "timestamp,tag_id,x_pos,y_pos,heading,direction,energy,speed,total_distance\n";
  Rng rng(cfg.seed);
  const int steps = static_cast<int>(cfg.duration_s * cfg.hz);
  const double tick = 1.0 / cfg.hz;

  std::vector<double> x(cfg.n_players), y(cfg.n_players), sx(cfg.n_players), sy(cfg.n_players);
  for (int p = 0; p < cfg.n_players; ++p) {
    if (cfg.interacting) {
      x[p] = next_uniform(rng, 20.0, 85.0);
      y[p] = next_uniform(rng, 10.0, 58.0);
      sx[p] = next_uniform(rng, -0.15, 0.15);
      sy[p] = next_uniform(rng, -0.15, 0.15);
    } else {
      // Dyadic starts and per-tick steps keep every arithmetic step exact;
      // axis-aligned velocities make Euclidean errors exact products too.
      x[p] = 16.0 + p;
      y[p] = 8.0 + 0.5 * p;
      if (p % 2 == 0) {
        sx[p] = (static_cast<double>((p / 2 % 5) - 2)) / 16.0;  // -0.125 .. 0.125 per tick
        sy[p] = 0.0;
      } else {
        sx[p] = 0.0;
        sy[p] = (static_cast<double>((p / 2 % 5) - 2)) / 32.0;
      }
    }
  }

  std::vector<double> dist(cfg.n_players, 0.0);
  char buf[256];
  for (int k = 0; k <= steps; ++k) {
    const double t = k * tick;
    // Anchor for the interacting mode: a slow loop around midfield.
    const double ax = 52.5 + 25.0 * std::cos(2 * 3.14159265358979323846 * t / 40.0);
    const double ay = 34.0 + 15.0 * std::sin(2 * 3.14159265358979323846 * t / 40.0);
    double cx = 0.0, cy = 0.0;
    for (int p = 0; p < cfg.n_players; ++p) {
      cx += x[p];
      cy += y[p];
    }
    cx /= cfg.n_players;
    cy /= cfg.n_players;
    for (int p = 0; p < cfg.n_players; ++p) {
      const double vx = sx[p] / tick, vy = sy[p] / tick;
      const double speed = std::hypot(vx, vy);
      const double heading = std::atan2(vy, vx);
      std::snprintf(buf, sizeof(buf), "%.6f,%d,%.17g,%.17g,%.6f,%.6f,0,%.6f,%.3f\n", t, p + 1,
                    x[p], y[p], heading, heading, speed, dist[p]);
      out << buf;
      // Advance.
      x[p] += sx[p];
      y[p] += sy[p];
      dist[p] += std::hypot(sx[p], sy[p]);
      if (cfg.interacting) {
        const double axp = 0.004 * (ax - x[p]) + 0.006 * (cx - x[p]) - 0.02 * vx;
        const double ayp = 0.004 * (ay - y[p]) + 0.006 * (cy - y[p]) - 0.02 * vy;
        sx[p] += axp * tick * tick + next_uniform(rng, -0.002, 0.002);
        sy[p] += ayp * tick * tick + next_uniform(rng, -0.002, 0.002);
      }
    }
  }
  return out.str();
}

}  // namespace vain::soccer
