#include "svxgerry/supervoxels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

namespace svxgerry {

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> rank;

  explicit UnionFind(std::int32_t n) : parent(n), rank(n, 0) {
    for (std::int32_t i = 0; i < n; ++i) parent[i] = i;
  }

  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  std::int32_t join(std::int32_t a, std::int32_t b) {
    if (rank[a] < rank[b]) std::swap(a, b);
    parent[b] = a;
    if (rank[a] == rank[b]) ++rank[a];
    return a;
  }
};

struct Edge {
  double w;
  std::int32_t a, b;
};

std::vector<Lab> volume_lab(const VideoVolume& v) {
  std::vector<Lab> lab(v.voxel_count());
  for (std::size_t i = 0; i < lab.size(); ++i) lab[i] = rgb_to_lab(v.data()[i]);
  return lab;
}

double lab_distance(const Lab& p, const Lab& q) {
  return std::sqrt((p.l - q.l) * (p.l - q.l) + (p.a - q.a) * (p.a - q.a) +
                   (p.b - q.b) * (p.b - q.b));
}

std::vector<Edge> lattice_edges(const VideoVolume& v, const std::vector<Lab>& lab) {
  const int T = v.frames(), H = v.height(), W = v.width();
  std::vector<Edge> edges;
  edges.reserve(v.voxel_count() * 3);
  auto index = [H, W](int t, int y, int x) {
    return static_cast<std::int32_t>((static_cast<std::size_t>(t) * H + y) * W + x);
  };
  for (int t = 0; t < T; ++t)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const std::int32_t p = index(t, y, x);
        if (x + 1 < W) {
          const std::int32_t q = index(t, y, x + 1);
          edges.push_back({lab_distance(lab[p], lab[q]), p, q});
        }
        if (y + 1 < H) {
          const std::int32_t q = index(t, y + 1, x);
          edges.push_back({lab_distance(lab[p], lab[q]), p, q});
        }
        if (t + 1 < T) {
          const std::int32_t q = index(t + 1, y, x);
          edges.push_back({lab_distance(lab[p], lab[q]), p, q});
        }
      }
  return edges;
}

SupervoxelLabeling densify(const LabelGrid& roots, std::int32_t hint) {
  SupervoxelLabeling out;
  out.labels = LabelGrid(roots.frames(), roots.height(), roots.width());
  std::vector<std::int32_t> dense(static_cast<std::size_t>(hint), -1);
  std::int32_t next = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const std::int32_t r = roots.raw()[i];
    if (dense[static_cast<std::size_t>(r)] < 0) dense[static_cast<std::size_t>(r)] = next++;
    out.labels.raw()[i] = dense[static_cast<std::size_t>(r)];
  }
  out.region_count = next;
  out.voxel_counts.assign(static_cast<std::size_t>(next), 0);
  for (std::int32_t id : out.labels.raw()) ++out.voxel_counts[static_cast<std::size_t>(id)];
  return out;
}

}  // namespace

SupervoxelLabeling segment_level0(const VideoVolume& v, double k_param, int min_size) {
  if (k_param <= 0.0) throw std::invalid_argument("segment_level0: k_param must be positive");
  if (min_size < 1) throw std::invalid_argument("segment_level0: min_size must be >= 1");
  if (v.voxel_count() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
    throw std::invalid_argument("segment_level0: volume too large");

  const auto n = static_cast<std::int32_t>(v.voxel_count());
  const std::vector<Lab> lab = volume_lab(v);
  std::vector<Edge> edges = lattice_edges(v, lab);
  std::sort(edges.begin(), edges.end(), [](const Edge& e, const Edge& f) {
    return std::tie(e.w, e.a, e.b) < std::tie(f.w, f.a, f.b);
  });

  UnionFind uf(n);
  std::vector<double> internal(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int32_t> size(static_cast<std::size_t>(n), 1);

  for (const Edge& e : edges) {
    const std::int32_t ra = uf.find(e.a), rb = uf.find(e.b);
    if (ra == rb) continue;
    const double ta = internal[static_cast<std::size_t>(ra)] + k_param / size[static_cast<std::size_t>(ra)];
    const double tb = internal[static_cast<std::size_t>(rb)] + k_param / size[static_cast<std::size_t>(rb)];
    if (e.w <= ta && e.w <= tb) {
      const std::int32_t r = uf.join(ra, rb);
      size[static_cast<std::size_t>(r)] =
          size[static_cast<std::size_t>(ra)] + size[static_cast<std::size_t>(rb)];
      internal[static_cast<std::size_t>(r)] = e.w;
    }
  }

  if (min_size > 1) {
    for (const Edge& e : edges) {
      const std::int32_t ra = uf.find(e.a), rb = uf.find(e.b);
      if (ra == rb) continue;
      if (size[static_cast<std::size_t>(ra)] < min_size ||
          size[static_cast<std::size_t>(rb)] < min_size) {
        const std::int32_t r = uf.join(ra, rb);
        size[static_cast<std::size_t>(r)] =
            size[static_cast<std::size_t>(ra)] + size[static_cast<std::size_t>(rb)];
      }
    }
  }

  LabelGrid roots(v.frames(), v.height(), v.width());
  for (std::int32_t i = 0; i < n; ++i) roots.raw()[static_cast<std::size_t>(i)] = uf.find(i);
  return densify(roots, n);
}

namespace {

struct RegionHistogram {
  std::vector<double> bins;  // 3 * n_bins, raw counts
  long long voxels = 0;

  void add(const RegionHistogram& o) {
    for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += o.bins[i];
    voxels += o.voxels;
  }
};

int bin_of(double v, double lo, double hi, int n_bins) {
  int b = static_cast<int>((v - lo) / (hi - lo) * n_bins);
  return std::clamp(b, 0, n_bins - 1);
}

// Chi-squared distance between per-channel-normalized histograms.
double chi2(const RegionHistogram& p, const RegionHistogram& q, int n_bins) {
  double d = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int b = 0; b < n_bins; ++b) {
      const std::size_t i = static_cast<std::size_t>(c) * n_bins + b;
      const double a = p.bins[i] / static_cast<double>(p.voxels);
      const double z = q.bins[i] / static_cast<double>(q.voxels);
      if (a + z > 0.0) d += (a - z) * (a - z) / (a + z);
    }
  return d;
}

struct MergeCandidate {
  double dist;
  std::int32_t a, b;       // cluster representatives, a < b
  std::uint32_t sa, sb;    // stamps at push time

  bool operator>(const MergeCandidate& o) const {
    return std::tie(dist, a, b) > std::tie(o.dist, o.a, o.b);
  }
};

}  // namespace

SupervoxelHierarchy build_hierarchy(const SupervoxelLabeling& level0, const VideoVolume& v,
                                    int n_levels, const HierarchyParams& params) {
  if (n_levels < 1) throw std::invalid_argument("build_hierarchy: n_levels must be >= 1");
  if (static_cast<std::size_t>(level0.labels.frames()) * level0.labels.height() *
          level0.labels.width() !=
      v.voxel_count())
    throw std::invalid_argument("build_hierarchy: labeling does not match video shape");

  SupervoxelHierarchy h;
  h.levels.push_back(level0);
  if (n_levels == 1) return h;

  const int n_bins = params.histogram_bins;
  const std::vector<Lab> lab = volume_lab(v);

  // Histograms for the current level's regions.
  std::vector<RegionHistogram> hist(static_cast<std::size_t>(level0.region_count));
  for (auto& rh : hist) rh.bins.assign(static_cast<std::size_t>(3) * n_bins, 0.0);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    auto& rh = hist[static_cast<std::size_t>(level0.labels.raw()[i])];
    rh.bins[static_cast<std::size_t>(bin_of(lab[i].l, 0.0, 100.0, n_bins))] += 1.0;
    rh.bins[static_cast<std::size_t>(n_bins + bin_of(lab[i].a, -128.0, 128.0, n_bins))] += 1.0;
    rh.bins[static_cast<std::size_t>(2 * n_bins + bin_of(lab[i].b, -128.0, 128.0, n_bins))] += 1.0;
    ++rh.voxels;
  }

  while (h.level_count() < n_levels) {
    const SupervoxelLabeling& cur = h.levels.back();
    const std::int32_t n = cur.region_count;
    if (n <= 1) break;

    // Region adjacency on the 6-connected lattice.
    std::set<std::pair<std::int32_t, std::int32_t>> adjacency;
    const int T = cur.labels.frames(), H = cur.labels.height(), W = cur.labels.width();
    auto add_pair = [&adjacency](std::int32_t p, std::int32_t q) {
      if (p == q) return;
      adjacency.emplace(std::min(p, q), std::max(p, q));
    };
    for (int t = 0; t < T; ++t)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          const std::int32_t p = cur.labels.at(t, y, x);
          if (x + 1 < W) add_pair(p, cur.labels.at(t, y, x + 1));
          if (y + 1 < H) add_pair(p, cur.labels.at(t, y + 1, x));
          if (t + 1 < T) add_pair(p, cur.labels.at(t + 1, y, x));
        }

    std::vector<std::set<std::int32_t>> neighbors(static_cast<std::size_t>(n));
    for (const auto& [a, b] : adjacency) {
      neighbors[static_cast<std::size_t>(a)].insert(b);
      neighbors[static_cast<std::size_t>(b)].insert(a);
    }

    UnionFind uf(n);
    std::vector<std::uint32_t> stamp(static_cast<std::size_t>(n), 0);
    std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, std::greater<>> heap;
    for (const auto& [a, b] : adjacency)
      heap.push({chi2(hist[static_cast<std::size_t>(a)], hist[static_cast<std::size_t>(b)], n_bins),
                 a, b, 0, 0});

    std::int32_t count = n;
    const std::int32_t target = n / 2;
    while (count > target && !heap.empty()) {
      const MergeCandidate c = heap.top();
      heap.pop();
      // Representatives are the smallest member ids, so find() of a current
      // representative is itself iff the cluster is unchanged.
      if (uf.find(c.a) != c.a || uf.find(c.b) != c.b) continue;
      if (stamp[static_cast<std::size_t>(c.a)] != c.sa ||
          stamp[static_cast<std::size_t>(c.b)] != c.sb)
        continue;

      // Keep the smaller id as representative.
      uf.parent[std::max(c.a, c.b)] = std::min(c.a, c.b);
      const std::int32_t keep = std::min(c.a, c.b), gone = std::max(c.a, c.b);
      hist[static_cast<std::size_t>(keep)].add(hist[static_cast<std::size_t>(gone)]);
      ++stamp[static_cast<std::size_t>(keep)];
      --count;

      auto& nk = neighbors[static_cast<std::size_t>(keep)];
      auto& ng = neighbors[static_cast<std::size_t>(gone)];
      nk.insert(ng.begin(), ng.end());
      nk.erase(keep);
      nk.erase(gone);
      ng.clear();
      for (std::int32_t other : nk) {
        const std::int32_t ro = uf.find(other);
        if (ro == keep) continue;
        const std::int32_t lo2 = std::min(keep, ro), hi2 = std::max(keep, ro);
        heap.push({chi2(hist[static_cast<std::size_t>(lo2)], hist[static_cast<std::size_t>(hi2)], n_bins),
                   lo2, hi2, stamp[static_cast<std::size_t>(lo2)],
                   stamp[static_cast<std::size_t>(hi2)]});
      }
    }

    if (count == n) break;  // nothing merged; further levels would be identical

    // Relabel the merged clustering densely and record the nesting map.
    LabelGrid roots(T, H, W);
    for (std::size_t i = 0; i < roots.size(); ++i)
      roots.raw()[i] = uf.find(cur.labels.raw()[i]);
    SupervoxelLabeling next = densify(roots, n);

    std::vector<std::int32_t> parent_map(static_cast<std::size_t>(n), -1);
    for (std::size_t i = 0; i < roots.size(); ++i)
      parent_map[static_cast<std::size_t>(cur.labels.raw()[i])] = next.labels.raw()[i];
    h.parent.push_back(std::move(parent_map));

    // Re-key histograms by the new dense ids.
    std::vector<RegionHistogram> next_hist(static_cast<std::size_t>(next.region_count));
    for (std::int32_t old = 0; old < n; ++old) {
      if (uf.find(old) != old) continue;
      const std::int32_t id = h.parent.back()[static_cast<std::size_t>(old)];
      next_hist[static_cast<std::size_t>(id)] = std::move(hist[static_cast<std::size_t>(old)]);
    }
    hist = std::move(next_hist);
    h.levels.push_back(std::move(next));
    if (h.levels.back().region_count <= 1) break;
  }
  return h;
}

ValidationReport validate_labeling(const LabelGrid& labels) {
  ValidationReport r;
  if (labels.empty()) {
    r.valid = false;
    r.message = "empty label grid";
    return r;
  }

  std::int32_t max_id = -1;
  for (std::int32_t id : labels.raw()) {
    if (id < 0) {
      r.valid = false;
      r.message = "coverage failure: negative (unlabeled) voxel";
      return r;
    }
    max_id = std::max(max_id, id);
  }

  r.region_count = max_id + 1;
  r.voxel_counts.assign(static_cast<std::size_t>(max_id) + 1, 0);
  for (std::int32_t id : labels.raw()) ++r.voxel_counts[static_cast<std::size_t>(id)];
  for (std::int32_t id = 0; id <= max_id; ++id)
    if (r.voxel_counts[static_cast<std::size_t>(id)] == 0) {
      r.valid = false;
      r.message = "density failure: id " + std::to_string(id) + " unused";
      return r;
    }
  return r;
}

SupervoxelLabeling labeling_from_grid(LabelGrid labels) {
  ValidationReport r = validate_labeling(labels);
  if (!r.valid) throw FormatError("invalid supervoxel labeling: " + r.message);
  SupervoxelLabeling out;
  out.labels = std::move(labels);
  out.region_count = r.region_count;
  out.voxel_counts = std::move(r.voxel_counts);
  return out;
}

double mean_volume(const SupervoxelLabeling& labeling) {
  return static_cast<double>(labeling.labels.size()) /
         static_cast<double>(labeling.region_count);
}

double mean_volume(const SupervoxelHierarchy& h, int level) {
  if (level < 0 || level >= h.level_count())
    throw std::invalid_argument("mean_volume: no such level");
  return mean_volume(h.levels[static_cast<std::size_t>(level)]);
}

}  // namespace svxgerry
