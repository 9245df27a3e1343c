#include "svxgerry/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace svxgerry {

namespace {

constexpr double kInf = 1e20;

// dt1d: d[x] = min_j (x - j)^2 + f[j], lower-envelope construction.
void dt1d(const std::vector<double>& f, int n, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

MaskFrame boundary_pixels(const MaskFrame& m) {
  const int h = m.height(), w = m.width();
  MaskFrame b(h, w, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (m.at(y, x) == 0) continue;
      const bool edge = y == 0 || y == h - 1 || x == 0 || x == w - 1;
      if (edge || m.at(y - 1, x) == 0 || m.at(y + 1, x) == 0 || m.at(y, x - 1) == 0 ||
          m.at(y, x + 1) == 0)
        b.at(y, x) = 1;
    }
  return b;
}

}  // namespace

double jaccard(const MaskFrame& m, const MaskFrame& g) {
  if (!m.same_shape(g)) throw std::invalid_argument("jaccard: shape mismatch");
  long inter = 0, uni = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const bool a = m.raw()[i] != 0, b = g.raw()[i] != 0;
    inter += a && b;
    uni += a || b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Grid2<double> squared_distance_transform(const MaskFrame& features) {
  const int h = features.height(), w = features.width();
  Grid2<double> d(h, w);
  for (std::size_t i = 0; i < features.size(); ++i)
    d.raw()[i] = features.raw()[i] != 0 ? 0.0 : kInf;

  const int n = std::max(h, w);
  std::vector<double> f(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  std::vector<int> v(static_cast<std::size_t>(n));

  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = d.at(y, x);
    dt1d(f, h, out, v, z);
    for (int y = 0; y < h; ++y) d.at(y, x) = out[static_cast<std::size_t>(y)];
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = d.at(y, x);
    dt1d(f, w, out, v, z);
    for (int x = 0; x < w; ++x) d.at(y, x) = out[static_cast<std::size_t>(x)];
  }
  return d;
}

double boundary_f(const MaskFrame& m, const MaskFrame& g, double tol) {
  if (!m.same_shape(g)) throw std::invalid_argument("boundary_f: shape mismatch");
  if (tol <= 0.0) throw std::invalid_argument("boundary_f: tolerance must be positive");

  const MaskFrame mb = boundary_pixels(m);
  const MaskFrame gb = boundary_pixels(g);
  long m_count = 0, g_count = 0;
  for (std::size_t i = 0; i < mb.size(); ++i) {
    m_count += mb.raw()[i] != 0;
    g_count += gb.raw()[i] != 0;
  }
  if (m_count == 0 && g_count == 0) return 1.0;
  if (m_count == 0 || g_count == 0) return 0.0;

  const double diag = std::sqrt(static_cast<double>(m.height()) * m.height() +
                                static_cast<double>(m.width()) * m.width());
  const double limit = tol * diag;
  const double limit_sq = limit * limit;

  const Grid2<double> dist_to_g = squared_distance_transform(gb);
  const Grid2<double> dist_to_m = squared_distance_transform(mb);

  long m_hit = 0, g_hit = 0;
  for (std::size_t i = 0; i < mb.size(); ++i) {
    if (mb.raw()[i] != 0 && dist_to_g.raw()[i] <= limit_sq) ++m_hit;
    if (gb.raw()[i] != 0 && dist_to_m.raw()[i] <= limit_sq) ++g_hit;
  }
  const double precision = static_cast<double>(m_hit) / static_cast<double>(m_count);
  const double recall = static_cast<double>(g_hit) / static_cast<double>(g_count);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

FrameStats sequence_stats(const std::vector<double>& per_frame) {
  if (per_frame.empty()) throw std::invalid_argument("sequence_stats: empty input");
  const int n = static_cast<int>(per_frame.size());

  FrameStats s;
  for (double v : per_frame) {
    s.mean += v;
    if (v > 0.5) s.recall += 1.0;
  }
  s.mean /= n;
  s.recall /= n;

  const int quarter = std::max(1, n / 4);
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < quarter; ++i) {
    head += per_frame[static_cast<std::size_t>(i)];
    tail += per_frame[static_cast<std::size_t>(n - 1 - i)];
  }
  s.decay = (head - tail) / quarter;
  return s;
}

double temporal_instability_proxy(const MaskSequence& masks) {
  if (masks.frames() < 2)
    throw std::invalid_argument("temporal_instability_proxy: need at least 2 frames");
  double total = 0.0;
  for (int t = 0; t + 1 < masks.frames(); ++t)
    total += 1.0 - jaccard(masks.frame(t), masks.frame(t + 1));
  return total / (masks.frames() - 1);
}

SequenceScore score_sequence(const MaskSequence& masks, const MaskSequence& gt,
                             double boundary_tol) {
  if (!masks.same_shape(gt)) throw std::invalid_argument("score_sequence: shape mismatch");

  SequenceScore score;
  for (int t = 0; t < masks.frames(); ++t) {
    const MaskFrame m = masks.frame(t);
    const MaskFrame g = gt.frame(t);
    score.per_frame_j.push_back(jaccard(m, g));
    score.per_frame_f.push_back(boundary_f(m, g, boundary_tol));
  }

  const FrameStats j = sequence_stats(score.per_frame_j);
  score.j_mean = j.mean;
  score.j_recall = j.recall;
  score.j_decay = j.decay;
  const FrameStats f = sequence_stats(score.per_frame_f);
  score.f_mean = f.mean;
  score.f_recall = f.recall;
  score.f_decay = f.decay;
  score.t_proxy = temporal_instability_proxy(masks);
  return score;
}

}  // namespace svxgerry
