#include "svxgerry/gerrymander.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "svxgerry/mvso.hpp"
#include "svxgerry/parallel.hpp"

namespace svxgerry {

ConsensusMode consensus_mode_from_string(const std::string& s) {
  if (s == "local") return ConsensusMode::LocalOnly;
  if (s == "nonlocal") return ConsensusMode::NonlocalOnly;
  if (s == "both") return ConsensusMode::Both;
  throw std::invalid_argument("unknown consensus mode: " + s);
}

std::string to_string(ConsensusMode mode) {
  switch (mode) {
    case ConsensusMode::LocalOnly: return "local";
    case ConsensusMode::NonlocalOnly: return "nonlocal";
    default: return "both";
  }
}

SupervoxelStats compute_stats(const VideoVolume& v, const SupervoxelLabeling& l,
                              const MaskSequence& m0, const ConsensusConfig& cfg) {
  if (l.labels.size() != v.voxel_count() || m0.size() != v.voxel_count())
    throw std::invalid_argument("compute_stats: shape mismatch");

  SupervoxelStats s;
  s.region_count = l.region_count;
  s.voxel_count.assign(static_cast<std::size_t>(l.region_count), 0);
  s.mean_lab.assign(static_cast<std::size_t>(l.region_count), {0.0, 0.0, 0.0});
  s.local_consensus.assign(static_cast<std::size_t>(l.region_count), 0.0);

  // Video-wide Lab range for normalization.
  double lo[3], hi[3];
  bool first = true;
  std::vector<Lab> lab(v.voxel_count());
  for (std::size_t i = 0; i < lab.size(); ++i) {
    lab[i] = rgb_to_lab(v.data()[i]);
    const double c[3] = {lab[i].l, lab[i].a, lab[i].b};
    for (int k = 0; k < 3; ++k) {
      if (first || c[k] < lo[k]) lo[k] = c[k];
      if (first || c[k] > hi[k]) hi[k] = c[k];
    }
    first = false;
  }

  for (std::size_t i = 0; i < lab.size(); ++i) {
    const auto id = static_cast<std::size_t>(l.labels.raw()[i]);
    ++s.voxel_count[id];
    const double c[3] = {lab[i].l, lab[i].a, lab[i].b};
    for (int k = 0; k < 3; ++k) {
      const double norm = hi[k] > lo[k] ? (c[k] - lo[k]) / (hi[k] - lo[k]) : 0.5;
      s.mean_lab[id][static_cast<std::size_t>(k)] += norm;
    }
    s.local_consensus[id] += cfg.label_scale * (m0.raw()[i] != 0 ? 1.0 : 0.0) + cfg.label_offset;
  }

  for (std::size_t id = 0; id < s.mean_lab.size(); ++id) {
    const auto n = static_cast<double>(s.voxel_count[id]);
    for (int k = 0; k < 3; ++k) s.mean_lab[id][static_cast<std::size_t>(k)] /= n;
    s.local_consensus[id] /= n;
  }
  return s;
}

int nonlocal_neighbor_count(int region_count, double ratio) {
  if (region_count <= 1) return 0;
  const auto nominal = static_cast<int>(std::llround(ratio * region_count));
  return std::min(region_count - 1, std::max(1, nominal));
}

namespace {

double city_block(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]) + std::fabs(a[2] - b[2]);
}

}  // namespace

std::pair<std::vector<int>, std::vector<double>> neighbor_weights(const SupervoxelStats& stats,
                                                                  int s0,
                                                                  const ConsensusConfig& cfg) {
  if (s0 < 0 || s0 >= stats.region_count)
    throw std::invalid_argument("neighbor_weights: bad region id");

  const int n_nl = nonlocal_neighbor_count(stats.region_count, cfg.neighbor_ratio);
  if (n_nl == 0) return {};

  struct Entry {
    double dist;
    int id;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(stats.region_count) - 1);
  for (int id = 0; id < stats.region_count; ++id) {
    if (id == s0) continue;
    entries.push_back({city_block(stats.mean_lab[static_cast<std::size_t>(s0)],
                                  stats.mean_lab[static_cast<std::size_t>(id)]),
                       id});
  }
  auto less = [](const Entry& a, const Entry& b) {
    return a.dist != b.dist ? a.dist < b.dist : a.id < b.id;
  };
  std::nth_element(entries.begin(), entries.begin() + (n_nl - 1), entries.end(), less);
  entries.resize(static_cast<std::size_t>(n_nl));
  std::sort(entries.begin(), entries.end(), less);

  std::vector<int> ids(static_cast<std::size_t>(n_nl));
  std::vector<double> weights(static_cast<std::size_t>(n_nl));
  double total = 0.0;
  for (int i = 0; i < n_nl; ++i) {
    ids[static_cast<std::size_t>(i)] = entries[static_cast<std::size_t>(i)].id;
    const double r = std::max(entries[static_cast<std::size_t>(i)].dist, cfg.distance_floor);
    weights[static_cast<std::size_t>(i)] = 1.0 / (r * r);
    total += weights[static_cast<std::size_t>(i)];
  }
  const double scale = (1.0 - cfg.w0()) / total;
  for (double& w : weights) w *= scale;
  return {std::move(ids), std::move(weights)};
}

ScoreField consensus_field(const SupervoxelLabeling& l, const SupervoxelStats& stats,
                           const ConsensusConfig& cfg, int threads) {
  if (l.region_count != stats.region_count)
    throw std::invalid_argument("consensus_field: stats do not match labeling");

  const double vote_lo = std::min(cfg.label_offset, cfg.label_scale + cfg.label_offset);
  const double vote_hi = std::max(cfg.label_offset, cfg.label_scale + cfg.label_offset);

  std::vector<double> region_value(static_cast<std::size_t>(l.region_count));
  parallel_for(l.region_count, threads, [&](int s0) {
    const auto [ids, weights] = neighbor_weights(stats, s0, cfg);
    double value;
    if (ids.empty()) {
      value = stats.local_consensus[static_cast<std::size_t>(s0)];
    } else {
      value = cfg.w0() * stats.local_consensus[static_cast<std::size_t>(s0)];
      for (std::size_t i = 0; i < ids.size(); ++i)
        value += weights[i] * stats.local_consensus[static_cast<std::size_t>(ids[i])];
    }
    region_value[static_cast<std::size_t>(s0)] = std::clamp(value, vote_lo, vote_hi);
  });

  ScoreField f(l.labels.frames(), l.labels.height(), l.labels.width(), vote_lo, vote_hi);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values.raw()[i] = region_value[static_cast<std::size_t>(l.labels.raw()[i])];
  return f;
}

ScoreField final_measure(const ScoreField& f0_scaled, const ScoreField& f_sc) {
  if (!f0_scaled.values.same_shape(f_sc.values))
    throw std::invalid_argument("final_measure: shape mismatch");

  ScoreField f(f0_scaled.values.frames(), f0_scaled.values.height(), f0_scaled.values.width(),
               f0_scaled.lo + f_sc.lo, f0_scaled.hi + f_sc.hi);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values.raw()[i] = f0_scaled.values.raw()[i] + f_sc.values.raw()[i];
  return f;
}

MaskSequence final_mask(const ScoreField& f, int connectivity) {
  const int T = f.values.frames(), H = f.values.height(), W = f.values.width();
  MaskSequence masks(T, H, W, 0);
  for (int t = 0; t < T; ++t) {
    const Grid2<double> score = f.values.frame(t);
    MaskFrame m(H, W, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m.raw()[i] = score.raw()[i] > 0.0 ? 1 : 0;
    masks.set_frame(t, keep_top_components(m, score, 2, connectivity));
  }
  return masks;
}

}  // namespace svxgerry
