// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. argv[1] is the repository root (schema file, regression baselines).

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "svxgerry/core.hpp"
#include "svxgerry/cues.hpp"
#include "svxgerry/gerrymander.hpp"
#include "svxgerry/io.hpp"
#include "svxgerry/metrics.hpp"
#include "svxgerry/mvso.hpp"
#include "svxgerry/outliers.hpp"
#include "svxgerry/pipeline.hpp"
#include "svxgerry/report.hpp"
#include "svxgerry/supervoxels.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace svxgerry;
using testsupport::Rng;

namespace {

struct Outcome {
  std::string name;
  std::vector<std::string> problems;
  double seconds = 0.0;
  double limit = 0.0;  // 0: no runtime bound

  void fail(const std::string& what) {
    if (problems.size() < 16) problems.push_back(what);
  }
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Grid2<Rgb8> frame_rgb(const VideoVolume& v, int t) {
  Grid2<Rgb8> f(v.height(), v.width());
  for (int y = 0; y < v.height(); ++y)
    for (int x = 0; x < v.width(); ++x) f.at(y, x) = v.at(t, y, x);
  return f;
}

double mean_jaccard(const MaskSequence& m, const MaskSequence& g) {
  double acc = 0.0;
  for (int t = 0; t < m.frames(); ++t) acc += jaccard(m.frame(t), g.frame(t));
  return acc / static_cast<double>(m.frames());
}

// -- criterion 1: outlier statistics ------------------------------------------

Outcome check_outlier_oracle() {
  Outcome out{"tukey quartiles, fences, masks, and alpha match a sort-and-scan oracle"};
  out.limit = 10.0;
  Timer timer;

  Rng rng(0xacc0001);
  for (int it = 0; it < 1000; ++it) {
    const int n = rng.range(1, 500);
    std::vector<double> data(static_cast<std::size_t>(n));
    for (auto& d : data) {
      const double u = rng.uniform();
      if (u < 0.35)
        d = std::round(rng.uniform() * 8.0) / 4.0;  // quarter steps, many ties
      else if (u < 0.65)
        d = rng.uniform() * 2.0 - 1.0;
      else if (u < 0.9)
        d = (rng.uniform() < 0.5 ? -1.0 : 1.0) / (rng.uniform() + 1e-3);  // heavy tails
      else
        d = (rng.uniform() - 0.5) * 1e6;
    }
    const double k = it % 3 == 0 ? 1.5 : rng.uniform() * 3.0;

    std::vector<double> s(data);
    std::sort(s.begin(), s.end());
    auto at = [&](double p) {
      const double pos = p * static_cast<double>(s.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, s.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      return s[lo] + frac * (s[hi] - s[lo]);
    };
    const double q1 = at(0.25), q2 = at(0.5), q3 = at(0.75);
    const double o1 = q1 - k * (q3 - q1);
    const double o3 = q3 + k * (q3 - q1);
    double num = 0.0, den = 0.0;
    std::vector<std::uint8_t> ref_mask(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      ref_mask[i] = (data[i] < o1 || data[i] > o3) ? 1 : 0;
      den += std::fabs(data[i]);
      if (ref_mask[i]) num += std::fabs(data[i]);
    }
    const double alpha = den == 0.0 ? 0.0 : num / den;

    std::vector<std::uint8_t> mask;
    const OutlierSummary got = tukey_summary(data, k, &mask);
    const auto [g1, g2, g3] = quartiles(data);
    if (g1 != got.q1 || g2 != got.q2 || g3 != got.q3)
      out.fail("quartiles() and tukey_summary() disagree at instance " + std::to_string(it));
    if (got.q1 != q1 || got.q2 != q2 || got.q3 != q3)
      out.fail("quartile mismatch at instance " + std::to_string(it));
    if (got.o1 != o1 || got.o3 != o3)
      out.fail("fence mismatch at instance " + std::to_string(it));
    if (mask != ref_mask)
      out.fail("outlier mask mismatch at instance " + std::to_string(it));
    if (!near(got.alpha, alpha, 1e-12))
      out.fail("alpha off by " + fmt(std::fabs(got.alpha - alpha)) + " at instance " +
               std::to_string(it));
    if (!out.problems.empty()) break;
  }

  out.seconds = timer.seconds();
  return out;
}

// -- criteria 2 and 3: consensus oracle and range invariants -------------------

struct RefStats {
  std::vector<long long> count;
  std::vector<std::array<double, 3>> mean_lab;
  std::vector<double> f_s;
};

RefStats ref_stats(const VideoVolume& v, const LabelGrid& labels, int region_count,
                   const MaskSequence& m0, const ConsensusConfig& cfg) {
  std::vector<Lab> lab(v.voxel_count());
  double lo[3], hi[3];
  for (std::size_t i = 0; i < lab.size(); ++i) {
    lab[i] = rgb_to_lab(v.data()[i]);
    const double c[3] = {lab[i].l, lab[i].a, lab[i].b};
    for (int k = 0; k < 3; ++k) {
      if (i == 0 || c[k] < lo[k]) lo[k] = c[k];
      if (i == 0 || c[k] > hi[k]) hi[k] = c[k];
    }
  }
  RefStats s;
  s.count.assign(static_cast<std::size_t>(region_count), 0);
  s.mean_lab.assign(static_cast<std::size_t>(region_count), {0.0, 0.0, 0.0});
  s.f_s.assign(static_cast<std::size_t>(region_count), 0.0);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    const auto id = static_cast<std::size_t>(labels.raw()[i]);
    ++s.count[id];
    const double c[3] = {lab[i].l, lab[i].a, lab[i].b};
    for (int k = 0; k < 3; ++k)
      s.mean_lab[id][static_cast<std::size_t>(k)] +=
          hi[k] > lo[k] ? (c[k] - lo[k]) / (hi[k] - lo[k]) : 0.5;
    s.f_s[id] += cfg.label_scale * (m0.raw()[i] != 0 ? 1.0 : 0.0) + cfg.label_offset;
  }
  for (std::size_t id = 0; id < s.f_s.size(); ++id) {
    for (int k = 0; k < 3; ++k)
      s.mean_lab[id][static_cast<std::size_t>(k)] /= static_cast<double>(s.count[id]);
    s.f_s[id] /= static_cast<double>(s.count[id]);
  }
  return s;
}

int ref_neighbor_count(int regions, double ratio) {
  if (regions <= 1) return 0;
  return std::min(regions - 1, std::max(1, static_cast<int>(std::llround(ratio * regions))));
}

std::vector<double> ref_region_values(const RefStats& s, const ConsensusConfig& cfg) {
  const int n = static_cast<int>(s.f_s.size());
  const int n_nl = ref_neighbor_count(n, cfg.neighbor_ratio);
  const double vote_lo = std::min(cfg.label_offset, cfg.label_scale + cfg.label_offset);
  const double vote_hi = std::max(cfg.label_offset, cfg.label_scale + cfg.label_offset);

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int s0 = 0; s0 < n; ++s0) {
    double value;
    if (n_nl == 0) {
      value = s.f_s[static_cast<std::size_t>(s0)];
    } else {
      std::vector<std::pair<double, int>> dist;
      for (int id = 0; id < n; ++id) {
        if (id == s0) continue;
        const auto& a = s.mean_lab[static_cast<std::size_t>(s0)];
        const auto& b = s.mean_lab[static_cast<std::size_t>(id)];
        dist.emplace_back(
            std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]) + std::fabs(a[2] - b[2]), id);
      }
      std::sort(dist.begin(), dist.end());
      double total = 0.0;
      std::vector<double> w(static_cast<std::size_t>(n_nl));
      for (int i = 0; i < n_nl; ++i) {
        const double r = std::max(dist[static_cast<std::size_t>(i)].first, cfg.distance_floor);
        w[static_cast<std::size_t>(i)] = 1.0 / (r * r);
        total += w[static_cast<std::size_t>(i)];
      }
      value = cfg.w0() * s.f_s[static_cast<std::size_t>(s0)];
      for (int i = 0; i < n_nl; ++i)
        value += w[static_cast<std::size_t>(i)] * (1.0 - cfg.w0()) / total *
                 s.f_s[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)];
    }
    out[static_cast<std::size_t>(s0)] = std::clamp(value, vote_lo, vote_hi);
  }
  return out;
}

// Row-major component sums; random scores keep the top-two ranking unambiguous.
MaskSequence ref_final_mask(const ScoreField& f, int connectivity) {
  const int T = f.values.frames(), H = f.values.height(), W = f.values.width();
  MaskSequence out(T, H, W, 0);
  for (int t = 0; t < T; ++t) {
    std::vector<int> comp(static_cast<std::size_t>(H) * W, -1);
    struct Info {
      double sum = 0.0;
      long count = 0;
      long first = 0;
    };
    std::vector<Info> infos;
    auto positive = [&](int y, int x) { return f.values.at(t, y, x) > 0.0; };
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const long p = static_cast<long>(y) * W + x;
        if (!positive(y, x) || comp[static_cast<std::size_t>(p)] >= 0) continue;
        const int id = static_cast<int>(infos.size());
        infos.push_back({0.0, 0, p});
        std::vector<long> queue{p};
        comp[static_cast<std::size_t>(p)] = id;
        while (!queue.empty()) {
          const long q = queue.back();
          queue.pop_back();
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if ((dy == 0 && dx == 0) || (connectivity == 4 && dy != 0 && dx != 0)) continue;
              const int ny = static_cast<int>(q / W) + dy, nx = static_cast<int>(q % W) + dx;
              if (ny < 0 || ny >= H || nx < 0 || nx >= W) continue;
              const long np = static_cast<long>(ny) * W + nx;
              if (!positive(ny, nx) || comp[static_cast<std::size_t>(np)] >= 0) continue;
              comp[static_cast<std::size_t>(np)] = id;
              queue.push_back(np);
            }
        }
      }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const int c = comp[static_cast<std::size_t>(static_cast<long>(y) * W + x)];
        if (c < 0) continue;
        auto& info = infos[static_cast<std::size_t>(c)];
        info.sum += f.values.at(t, y, x);
        ++info.count;
      }
    std::vector<int> order(infos.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& ia = infos[static_cast<std::size_t>(a)];
      const auto& ib = infos[static_cast<std::size_t>(b)];
      if (ia.sum != ib.sum) return ia.sum > ib.sum;
      if (ia.count != ib.count) return ia.count > ib.count;
      return ia.first < ib.first;
    });
    std::vector<bool> keep(infos.size(), infos.size() <= 2);
    for (std::size_t i = 0; i < order.size() && i < 2; ++i)
      keep[static_cast<std::size_t>(order[i])] = true;
    for (long p = 0; p < static_cast<long>(comp.size()); ++p) {
      const int c = comp[static_cast<std::size_t>(p)];
      out.at(t, static_cast<int>(p / W), static_cast<int>(p % W)) =
          c >= 0 && keep[static_cast<std::size_t>(c)] ? 1 : 0;
    }
  }
  return out;
}

SupervoxelLabeling random_labeling(Rng& rng, int frames, int height, int width, int max_regions) {
  LabelGrid raw(frames, height, width, 0);
  for (auto& id : raw.raw()) id = rng.range(0, max_regions - 1);
  std::map<std::int32_t, std::int32_t> remap;
  for (auto& id : raw.raw()) id = remap.emplace(id, static_cast<std::int32_t>(remap.size())).first->second;
  return labeling_from_grid(std::move(raw));
}

std::pair<Outcome, Outcome> check_consensus_oracle() {
  Outcome c2{"consensus fields and masks match a flat re-evaluation"};
  Outcome c3{"score ranges and neighbor weight sums hold across randomized runs"};
  c2.limit = 30.0;
  Timer timer;

  Rng rng(0xacc0002);
  for (int it = 0; it < 200 && c2.problems.empty() && c3.problems.empty(); ++it) {
    const int T = rng.range(2, 4);
    const int H = rng.range(2, 8);
    const int W = rng.range(2, 8);
    const VideoVolume v = testsupport::random_video(rng, T, H, W);
    const SupervoxelLabeling labeling = random_labeling(rng, T, H, W, rng.range(1, 12));

    MaskSequence m0(T, H, W, 0);
    for (auto& b : m0.raw()) b = rng.uniform() < 0.45 ? 1 : 0;
    ScoreField f0(T, H, W, 0.0, 1.0);
    for (auto& s : f0.values.raw()) s = rng.uniform();
    if (!f0.in_declared_range()) c3.fail("random f0_scaled left [0,1]");

    for (const auto mode :
         {ConsensusMode::LocalOnly, ConsensusMode::NonlocalOnly, ConsensusMode::Both}) {
      ConsensusConfig cfg;
      cfg.mode = mode;
      const double ratios[] = {0.1, 0.3, 0.6, 1.0};
      cfg.neighbor_ratio = ratios[rng.range(0, 3)];
      if (it % 4 == 3) cfg.w0_override = 0.25;

      const SupervoxelStats stats = compute_stats(v, labeling, m0, cfg);
      const RefStats ref = ref_stats(v, labeling.labels, labeling.region_count, m0, cfg);
      const std::vector<double> region_values = ref_region_values(ref, cfg);

      const ScoreField f_sc = consensus_field(labeling, stats, cfg);
      if (f_sc.lo != -1.0 || f_sc.hi != 1.0 || !f_sc.in_declared_range())
        c3.fail("consensus field left [-1,1] at instance " + std::to_string(it));
      for (std::size_t i = 0; i < f_sc.values.size(); ++i) {
        const double want =
            region_values[static_cast<std::size_t>(labeling.labels.raw()[i])];
        if (!near(f_sc.values.raw()[i], want, 1e-12)) {
          c2.fail("consensus value off by " + fmt(std::fabs(f_sc.values.raw()[i] - want)) +
                  " at instance " + std::to_string(it));
          break;
        }
      }

      const ScoreField f = final_measure(f0, f_sc);
      if (f.lo != -1.0 || f.hi != 2.0 || !f.in_declared_range())
        c3.fail("final measure left [-1,2] at instance " + std::to_string(it));
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double want = f0.values.raw()[i] +
                            region_values[static_cast<std::size_t>(labeling.labels.raw()[i])];
        if (!near(f.values.raw()[i], want, 1e-12)) {
          c2.fail("final measure off at instance " + std::to_string(it));
          break;
        }
      }

      const int connectivity = it % 2 == 0 ? 8 : 4;
      const MaskSequence mask = final_mask(f, connectivity);
      if (mask.raw() != ref_final_mask(f, connectivity).raw())
        c2.fail("final mask mismatch at instance " + std::to_string(it));

      for (int s0 = 0; s0 < stats.region_count; ++s0) {
        const auto [ids, weights] = neighbor_weights(stats, s0, cfg);
        if (ids.empty()) continue;
        double sum = cfg.w0();
        for (const double w : weights) sum += w;
        if (!near(sum, 1.0, 1e-9))
          c3.fail("weight sum " + fmt(sum) + " at instance " + std::to_string(it));
      }
      if (!c2.problems.empty() || !c3.problems.empty()) break;
    }
  }
  c2.seconds = timer.seconds();

  // built-in initial estimates obey the f0_scaled and m0 ranges too
  Timer mvso_timer;
  Rng vrng(0xacc0003);
  for (int i = 0; i < 3 && c3.problems.empty(); ++i) {
    const VideoVolume v = testsupport::random_video(vrng, 3, 12, 12);
    FlowParams fp;
    fp.patch = 4;
    fp.radius = 2;
    fp.levels = 1;
    std::vector<FlowField> flows;
    std::vector<SaliencyMap> sal;
    for (int t = 0; t < v.frames(); ++t) {
      if (t + 1 < v.frames()) flows.push_back(estimate_flow(frame_rgb(v, t), frame_rgb(v, t + 1), fp));
      sal.push_back(estimate_saliency(frame_rgb(v, t)));
    }
    const InitialEstimate est = compute_initial_estimate(flows, sal, MvsoParams{});
    if (est.f0_scaled.lo != 0.0 || est.f0_scaled.hi != 1.0 || !est.f0_scaled.in_declared_range())
      c3.fail("built-in f0_scaled left [0,1]");
    for (const auto b : est.m0.raw())
      if (b > 1) {
        c3.fail("initial mask holds values outside {0,1}");
        break;
      }
  }
  c3.seconds = timer.seconds() + mvso_timer.seconds();
  return {std::move(c2), std::move(c3)};
}

// -- criterion 4: hierarchy invariants ----------------------------------------

Outcome check_hierarchy_invariants() {
  Outcome out{"supervoxel hierarchies stay dense, nested, and volume-monotone"};
  out.limit = 60.0;
  Timer timer;

  Rng rng(0xacc0004);
  for (int it = 0; it < 50 && out.problems.empty(); ++it) {
    const int T = rng.range(2, 3);
    const int H = rng.range(3, 8);
    const int W = rng.range(3, 8);
    const VideoVolume v = testsupport::random_video(rng, T, H, W);
    const double k = 5.0 + rng.uniform() * 150.0;
    const int min_size = rng.range(1, 4);

    const SupervoxelLabeling level0 = segment_level0(v, k, min_size);
    const SupervoxelHierarchy h = build_hierarchy(level0, v, 4);
    const std::string tag = " at instance " + std::to_string(it);

    if (h.level_count() < 1 || h.level_count() > 4) {
      out.fail("unexpected level count" + tag);
      continue;
    }
    if (h.parent.size() + 1 != h.levels.size()) {
      out.fail("parent map count does not match level count" + tag);
      continue;
    }
    for (int l = 0; l < h.level_count(); ++l) {
      const auto& lab = h.levels[static_cast<std::size_t>(l)];
      const ValidationReport report = validate_labeling(lab.labels);
      if (!report.valid) {
        out.fail("level " + std::to_string(l) + " not a dense cover: " + report.message + tag);
        break;
      }
      if (report.region_count != lab.region_count || report.voxel_counts != lab.voxel_counts) {
        out.fail("level " + std::to_string(l) + " stored counts disagree" + tag);
        break;
      }
    }
    for (std::size_t l = 0; l + 1 < h.levels.size() && out.problems.empty(); ++l) {
      const auto& fine = h.levels[l].labels;
      const auto& coarse = h.levels[l + 1].labels;
      const auto& parent = h.parent[l];
      if (static_cast<int>(parent.size()) != h.levels[l].region_count) {
        out.fail("parent map size mismatch at level " + std::to_string(l) + tag);
        break;
      }
      for (std::size_t i = 0; i < fine.size(); ++i)
        if (parent[static_cast<std::size_t>(fine.raw()[i])] != coarse.raw()[i]) {
          out.fail("regions do not nest between levels " + std::to_string(l) + " and " +
                   std::to_string(l + 1) + tag);
          break;
        }
    }
    for (int l = 1; l < h.level_count() && out.problems.empty(); ++l)
      if (mean_volume(h, l) < mean_volume(h, l - 1))
        out.fail("mean volume shrank at level " + std::to_string(l) + tag);
  }

  out.seconds = timer.seconds();
  return out;
}

// -- criterion 5: synthetic segmentation quality -------------------------------

Outcome check_moving_square(const fs::path& source_dir) {
  Outcome out{"moving-square segmentation clears its quality floor"};
  out.limit = 60.0;
  Timer timer;

  const testsupport::MovingSquare clip = testsupport::moving_square_video(20, 64, 12, 0xbea70001);
  std::vector<FlowField> flows;
  std::vector<SaliencyMap> sal;
  for (int t = 0; t < clip.video.frames(); ++t) {
    if (t + 1 < clip.video.frames())
      flows.push_back(estimate_flow(frame_rgb(clip.video, t), frame_rgb(clip.video, t + 1)));
    sal.push_back(estimate_saliency(frame_rgb(clip.video, t)));
  }
  const InitialEstimate initial = compute_initial_estimate(flows, sal, MvsoParams{});
  if (initial.f0_scaled.lo != 0.0 || initial.f0_scaled.hi != 1.0 ||
      !initial.f0_scaled.in_declared_range())
    out.fail("f0_scaled left [0,1]");
  const double j_mvso = mean_jaccard(initial.m0, clip.gt);
  if (!(j_mvso >= 0.5)) out.fail("initial-estimate jaccard " + fmt(j_mvso) + " below 0.5");

  const VideoVolume reduced = downscale_volume(clip.video, 4);
  const SupervoxelLabeling level0 = segment_level0(reduced, 150.0, 100);
  const SupervoxelLabeling full = labeling_from_grid(
      upscale_labels(level0.labels, clip.video.height(), clip.video.width()));
  ConsensusConfig cfg;
  cfg.mode = ConsensusMode::LocalOnly;
  const SupervoxelStats stats = compute_stats(clip.video, full, initial.m0, cfg);
  const ScoreField f_sc = consensus_field(full, stats, cfg);
  const ScoreField f = final_measure(initial.f0_scaled, f_sc);
  const MaskSequence masks = final_mask(f, 8);
  const double j_native = mean_jaccard(masks, clip.gt);
  if (!(j_native >= j_mvso - 0.02))
    out.fail("consensus jaccard " + fmt(j_native) + " fell more than 0.02 below " + fmt(j_mvso));

  const fs::path baseline_file = source_dir / "tests" / "acceptance" / "baselines.json";
  if (fs::exists(baseline_file)) {
    std::ifstream in(baseline_file);
    nlohmann::json base;
    in >> base;
    const double want_mvso = base.at("moving_square").at("j_mvso").get<double>();
    const double want_native = base.at("moving_square").at("j_native").get<double>();
    if (!near(j_mvso, want_mvso, 1e-9))
      out.fail("initial-estimate jaccard drifted from recorded " + fmt(want_mvso) + " to " +
               fmt(j_mvso));
    if (!near(j_native, want_native, 1e-9))
      out.fail("consensus jaccard drifted from recorded " + fmt(want_native) + " to " +
               fmt(j_native));
  } else if (out.problems.empty()) {
    nlohmann::json base;
    base["moving_square"]["j_mvso"] = j_mvso;
    base["moving_square"]["j_native"] = j_native;
    std::ofstream outfile(baseline_file);
    if (!outfile) {
      out.fail("cannot record baselines at " + baseline_file.string());
    } else {
      outfile << base.dump(2) << "\n";
    }
  }

  out.seconds = timer.seconds();
  return out;
}

// -- criteria 6 and 9: benchmark determinism and report fidelity ---------------

bool validate_json(const nlohmann::json& root, const nlohmann::json& schema,
                   const nlohmann::json& value, const std::string& path, std::string* problem) {
  if (schema.contains("$ref")) {
    const std::string ref = schema["$ref"].get<std::string>();
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) {
      *problem = path + ": unsupported $ref " + ref;
      return false;
    }
    return validate_json(root, root.at("definitions").at(ref.substr(prefix.size())), value, path,
                         problem);
  }
  if (schema.contains("const") && value != schema["const"]) {
    *problem = path + ": expected constant " + schema["const"].dump();
    return false;
  }
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array())
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    else
      ok = matches(schema["type"].get<std::string>());
    if (!ok) {
      *problem = path + ": type " + schema["type"].dump() + " does not accept " + value.dump();
      return false;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema["enum"]) ok = ok || value == e;
    if (!ok) {
      *problem = path + ": " + value.dump() + " not in enum";
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>())) {
          *problem = path + ": missing required key " + key.get<std::string>();
          return false;
        }
    const nlohmann::json props = schema.value("properties", nlohmann::json::object());
    if (schema.value("additionalProperties", nlohmann::json(true)) == nlohmann::json(false))
      for (auto it = value.begin(); it != value.end(); ++it)
        if (!props.contains(it.key())) {
          *problem = path + ": unexpected key " + it.key();
          return false;
        }
    for (auto it = props.begin(); it != props.end(); ++it)
      if (value.contains(it.key()) &&
          !validate_json(root, it.value(), value.at(it.key()), path + "/" + it.key(), problem))
        return false;
  }
  if (value.is_array() && schema.contains("items")) {
    int index = 0;
    for (const auto& element : value) {
      if (!validate_json(root, schema["items"], element, path + "/" + std::to_string(index),
                         problem))
        return false;
      ++index;
    }
  }
  return true;
}

std::pair<Outcome, Outcome> check_benchmark(const fs::path& source_dir) {
  Outcome c6{"benchmark CSV is identical across thread counts"};
  Outcome c9{"benchmark report carries all columns and validates against the schema"};
  Timer timer;

  testsupport::TempDir tmp;
  const fs::path dataset = tmp.path() / "ds";
  const testsupport::MovingSquare a = testsupport::moving_square_video(6, 24, 8, 0xbea70002);
  const testsupport::MovingSquare b = testsupport::moving_square_video(6, 24, 8, 0xbea70003);
  testsupport::write_video_dataset(dataset / "alpha", a.video, &a.gt);
  testsupport::write_video_dataset(dataset / "bravo", b.video, &b.gt);

  PipelineConfig cfg;
  cfg.input = dataset.string();
  cfg.output = (tmp.path() / "out1").string();
  cfg.downscale_factor = 2;
  cfg.flow_patch = 4;
  cfg.flow_radius = 4;
  cfg.flow_levels = 2;
  cfg.native_k = 60.0;
  cfg.native_min_size = 10;
  cfg.native_levels = 2;
  cfg.sweep_levels = "0,1";
  cfg.sweep_modes = "none,local,both";
  cfg.threads = 1;
  const BenchmarkResult r1 = run_benchmark(cfg);

  cfg.threads = 4;
  cfg.output = (tmp.path() / "out2").string();
  const BenchmarkResult r2 = run_benchmark(cfg);
  if (r1.csv != r2.csv) c6.fail("CSV differs between 1 and 4 threads");
  c6.seconds = timer.seconds();

  Timer report_timer;
  const auto rows = parse_csv(r1.csv);
  if (rows.empty()) {
    c9.fail("empty CSV");
  } else {
    const auto& header = rows.front();
    for (const char* column :
         {"j_mean", "j_recall_frames", "j_recall_seqs", "j_decay", "f_mean", "f_recall_frames",
          "f_recall_seqs", "f_decay", "t_instability_proxy", "rank", "mean_svx_volume"})
      if (std::find(header.begin(), header.end(), column) == header.end())
        c9.fail(std::string("missing column ") + column);

    int aggregates = 0;
    bool svx_volume_seen = false;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() != header.size()) {
        c9.fail("ragged row " + std::to_string(r));
        break;
      }
      if (row[0] != "aggregate") continue;
      ++aggregates;
      if (row[21] != "ok") continue;
      if (row[9].empty() || row[13].empty() || row[17].empty() || row[20].empty())
        c9.fail("aggregate " + row[1] + " left a metric or rank cell empty");
      if (!row[18].empty()) svx_volume_seen = true;
    }
    if (aggregates == 0) c9.fail("no aggregate rows");
    if (!svx_volume_seen) c9.fail("no aggregate reports a mean supervoxel volume");
  }

  std::ifstream schema_in(source_dir / "docs" / "report_schema.json");
  if (!schema_in) {
    c9.fail("cannot open docs/report_schema.json");
  } else {
    nlohmann::json schema;
    schema_in >> schema;
    std::string problem;
    if (!validate_json(schema, schema, r1.json, "", &problem)) c9.fail("schema: " + problem);
    // round trip through text the way the report lands on disk
    const nlohmann::json reparsed = nlohmann::json::parse(r1.json.dump());
    if (!validate_json(schema, schema, reparsed, "", &problem))
      c9.fail("schema after reparse: " + problem);
  }
  c9.seconds = report_timer.seconds();
  return {std::move(c6), std::move(c9)};
}

// -- criterion 7: file round trips ---------------------------------------------

Outcome check_round_trips() {
  Outcome out{"mask, flow, and label round trips are exact"};
  Timer timer;

  testsupport::TempDir tmp;
  Rng rng(0xacc0007);

  MaskSequence masks(3, 9, 7, 0);
  for (auto& b : masks.raw()) b = rng.uniform() < 0.4 ? 1 : 0;
  write_masks(masks, tmp.path() / "masks");
  if (load_ground_truth(tmp.path() / "masks").raw() != masks.raw())
    out.fail("mask round trip changed pixels");

  FlowField flow(5, 6);
  for (std::size_t i = 0; i < flow.u.size(); ++i) {
    flow.u.raw()[i] = static_cast<double>(static_cast<float>(rng.uniform() * 40.0 - 20.0));
    flow.v.raw()[i] = static_cast<double>(static_cast<float>(rng.uniform() * 40.0 - 20.0));
  }
  flow.u.raw()[0] = 0.0;
  flow.v.raw()[0] = -1.0;
  write_flo(tmp.path() / "field.flo", flow);
  const FlowField flow_back = read_flo(tmp.path() / "field.flo");
  if (flow_back.u.raw() != flow.u.raw() || flow_back.v.raw() != flow.v.raw())
    out.fail("flow round trip changed components");

  const SupervoxelLabeling labeling = random_labeling(rng, 3, 8, 5, 40);
  write_supervoxel_labels(tmp.path() / "labels", labeling.labels);
  const LabelGrid back = load_supervoxel_labels(tmp.path() / "labels");
  if (back.size() != labeling.labels.size()) {
    out.fail("label round trip changed the voxel count");
  } else {
    std::map<std::int32_t, std::int32_t> fwd, bwd;
    for (std::size_t i = 0; i < back.size(); ++i) {
      const std::int32_t orig = labeling.labels.raw()[i];
      const std::int32_t got = back.raw()[i];
      const auto f = fwd.emplace(orig, got);
      const auto g = bwd.emplace(got, orig);
      if (f.first->second != got || g.first->second != orig) {
        out.fail("label round trip broke the partition at voxel " + std::to_string(i));
        break;
      }
    }
  }

  out.seconds = timer.seconds();
  return out;
}

// -- criterion 8: metric examples ----------------------------------------------

Outcome check_metric_examples() {
  Outcome out{"metric hand examples and self-comparisons check out"};
  Timer timer;

  MaskFrame m(6, 6, 0), g(6, 6, 0);
  m.at(1, 1) = 1;
  m.at(1, 2) = 1;
  g = m;
  if (jaccard(m, g) != 1.0) out.fail("identical masks miss jaccard 1");
  g.at(1, 1) = 0;
  g.at(1, 2) = 0;
  g.at(4, 4) = 1;
  g.at(4, 5) = 1;
  if (jaccard(m, g) != 0.0) out.fail("disjoint masks miss jaccard 0");
  g.at(4, 4) = 0;
  g.at(4, 5) = 0;
  g.at(1, 2) = 1;
  g.at(1, 3) = 1;  // shares one of two pixels
  if (jaccard(m, g) != 1.0 / 3.0) out.fail("one shared pixel misses jaccard 1/3");

  MaskFrame square(16, 16, 0);
  for (int y = 5; y <= 10; ++y)
    for (int x = 5; x <= 10; ++x) square.at(y, x) = 1;
  if (boundary_f(square, square) != 1.0) out.fail("identical boundaries miss F 1");
  const MaskFrame empty(16, 16, 0);
  if (boundary_f(empty, square) != 0.0) out.fail("empty prediction misses F 0");
  MaskFrame dilated(16, 16, 0);
  for (int y = 4; y <= 11; ++y)
    for (int x = 4; x <= 11; ++x) dilated.at(y, x) = 1;
  if (boundary_f(dilated, square, 0.1) != 1.0)
    out.fail("one-pixel dilation within a two-pixel tolerance misses F 1");

  const FrameStats constant = sequence_stats(std::vector<double>(8, 0.8));
  if (!near(constant.mean, 0.8, 1e-12) || constant.recall != 1.0 || constant.decay != 0.0)
    out.fail("constant sequence stats off");
  const FrameStats split = sequence_stats({1.0, 1.0, 0.0, 0.0});
  if (split.mean != 0.5 || split.recall != 0.5 || split.decay != 1.0)
    out.fail("half-good sequence stats off");
  const FrameStats zeros = sequence_stats(std::vector<double>(5, 0.0));
  if (zeros.mean != 0.0 || zeros.recall != 0.0 || zeros.decay != 0.0)
    out.fail("all-zero sequence stats off");

  MaskSequence still(4, 5, 5, 0);
  for (int t = 0; t < 4; ++t) still.at(t, 2, 2) = 1;
  if (temporal_instability_proxy(still) != 0.0) out.fail("static masks miss proxy 0");
  MaskSequence flip(4, 5, 5, 0);
  for (int t = 0; t < 4; ++t) flip.at(t, 2, t % 2 == 0 ? 0 : 4) = 1;
  if (temporal_instability_proxy(flip) != 1.0) out.fail("disjoint alternation misses proxy 1");

  Rng rng(0xacc0008);
  MaskSequence noisy(5, 8, 8, 0);
  for (auto& b : noisy.raw()) b = rng.uniform() < 0.5 ? 1 : 0;
  double acc = 0.0;
  for (int t = 0; t + 1 < noisy.frames(); ++t) {
    long inter = 0, uni = 0;
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        const bool p = noisy.at(t, y, x) != 0, q = noisy.at(t + 1, y, x) != 0;
        inter += p && q;
        uni += p || q;
      }
    acc += 1.0 - (uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni));
  }
  if (!near(temporal_instability_proxy(noisy), acc / 4.0, 1e-12))
    out.fail("random-mask proxy disagrees with a direct computation");

  for (int it = 0; it < 100; ++it) {
    const int h = rng.range(4, 24), w = rng.range(4, 24);
    MaskFrame mask(h, w, 0);
    const double density = rng.uniform();
    for (auto& b : mask.raw()) b = rng.uniform() < density * 0.8 ? 1 : 0;
    if (boundary_f(mask, mask) != 1.0) {
      out.fail("self-comparison misses F 1 at instance " + std::to_string(it));
      break;
    }
  }

  out.seconds = timer.seconds();
  return out;
}

void print_outcome(Outcome out, int* failures) {
  if (out.limit > 0.0 && out.seconds > out.limit)
    out.fail("took " + fmt(out.seconds) + "s, budget " + fmt(out.limit) + "s");
  if (out.problems.empty()) {
    std::printf("PASS: %s (%.2fs)\n", out.name.c_str(), out.seconds);
    return;
  }
  std::string detail = out.problems.front();
  if (out.problems.size() > 1)
    detail += " [and " + std::to_string(out.problems.size() - 1) + " more]";
  std::printf("FAIL: %s (%.2fs): %s\n", out.name.c_str(), out.seconds, detail.c_str());
  ++*failures;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <repo-root>\n");
    return 2;
  }
  const fs::path source_dir = argv[1];

  int failures = 0;
  print_outcome(check_outlier_oracle(), &failures);
  auto [c2, c3] = check_consensus_oracle();
  print_outcome(std::move(c2), &failures);
  print_outcome(std::move(c3), &failures);
  print_outcome(check_hierarchy_invariants(), &failures);
  print_outcome(check_moving_square(source_dir), &failures);
  auto [c6, c9] = check_benchmark(source_dir);
  print_outcome(std::move(c6), &failures);
  print_outcome(check_round_trips(), &failures);
  print_outcome(check_metric_examples(), &failures);
  print_outcome(std::move(c9), &failures);
  return failures == 0 ? 0 : 1;
}
