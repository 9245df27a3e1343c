#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "svxgerry/core.hpp"
#include "svxgerry/cues.hpp"
#include "svxgerry/gerrymander.hpp"
#include "svxgerry/metrics.hpp"
#include "svxgerry/mvso.hpp"
#include "svxgerry/outliers.hpp"
#include "svxgerry/supervoxels.hpp"

namespace py = pybind11;
using namespace svxgerry;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

VideoVolume video_from_array(const CArray<std::uint8_t>& arr) {
  if (arr.ndim() != 4 || arr.shape(3) != 3)
    throw py::value_error("video must have shape (T, H, W, 3)");
  VideoVolume v(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                static_cast<int>(arr.shape(2)));
  const std::uint8_t* p = arr.data();
  Rgb8* out = v.data();
  for (std::size_t i = 0; i < v.voxel_count(); ++i, p += 3) out[i] = {p[0], p[1], p[2]};
  return v;
}

Grid2<Rgb8> frame_from_array(const CArray<std::uint8_t>& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 3)
    throw py::value_error("frame must have shape (H, W, 3)");
  Grid2<Rgb8> f(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
  const std::uint8_t* p = arr.data();
  Rgb8* out = f.data();
  for (std::size_t i = 0; i < f.size(); ++i, p += 3) out[i] = {p[0], p[1], p[2]};
  return f;
}

template <typename T>
py::array_t<T> grid2_to_array(const Grid2<T>& g) {
  py::array_t<T> out({g.height(), g.width()});
  std::copy(g.data(), g.data() + g.size(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> grid3_to_array(const Grid3<T>& g) {
  py::array_t<T> out({g.frames(), g.height(), g.width()});
  std::copy(g.data(), g.data() + g.size(), out.mutable_data());
  return out;
}

template <typename T>
Grid3<T> grid3_from_array(const CArray<T>& arr, const char* what) {
  if (arr.ndim() != 3) throw py::value_error(std::string(what) + " must have shape (T, H, W)");
  Grid3<T> g(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
             static_cast<int>(arr.shape(2)));
  std::copy(arr.data(), arr.data() + g.size(), g.data());
  return g;
}

MaskFrame mask_frame_from_array(const CArray<std::uint8_t>& arr, const char* what) {
  if (arr.ndim() != 2) throw py::value_error(std::string(what) + " must have shape (H, W)");
  MaskFrame m(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
  const std::uint8_t* p = arr.data();
  for (std::size_t i = 0; i < m.size(); ++i) m.raw()[i] = p[i] ? 1 : 0;
  return m;
}

MaskSequence masks_from_array(const CArray<std::uint8_t>& arr, const char* what) {
  Grid3<std::uint8_t> g = grid3_from_array<std::uint8_t>(arr, what);
  for (auto& v : g.raw()) v = v ? 1 : 0;
  return g;
}

std::vector<FlowField> flows_from_arrays(const CArray<double>& u, const CArray<double>& v) {
  if (u.ndim() != 3 || v.ndim() != 3 || u.shape(0) != v.shape(0) ||
      u.shape(1) != v.shape(1) || u.shape(2) != v.shape(2))
    throw py::value_error("flow_u and flow_v must both have shape (T-1, H, W)");
  const int n = static_cast<int>(u.shape(0));
  const int h = static_cast<int>(u.shape(1));
  const int w = static_cast<int>(u.shape(2));
  std::vector<FlowField> flows;
  flows.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    FlowField f(h, w);
    const std::size_t off = static_cast<std::size_t>(t) * h * w;
    std::copy(u.data() + off, u.data() + off + f.u.size(), f.u.data());
    std::copy(v.data() + off, v.data() + off + f.v.size(), f.v.data());
    flows.push_back(std::move(f));
  }
  return flows;
}

std::vector<SaliencyMap> saliency_from_array(const CArray<double>& arr) {
  Grid3<double> g = grid3_from_array<double>(arr, "saliency");
  std::vector<SaliencyMap> maps;
  maps.reserve(static_cast<std::size_t>(g.frames()));
  for (int t = 0; t < g.frames(); ++t) maps.push_back(g.frame(t));
  return maps;
}

py::dict estimate_to_dict(const InitialEstimate& e) {
  py::dict out;
  out["f0"] = grid3_to_array(e.f0.values);
  out["f0_scaled"] = grid3_to_array(e.f0_scaled.values);
  out["m0"] = grid3_to_array(e.m0);
  return out;
}

MvsoParams make_params(double tukey_k, bool magnitude_sqrt, bool scale_per_video,
                       int connectivity) {
  MvsoParams p;
  p.tukey_k = tukey_k;
  p.magnitude_sqrt = magnitude_sqrt;
  p.scale_per_video = scale_per_video;
  p.connectivity = connectivity;
  return p;
}

ConsensusConfig make_consensus(const std::string& mode, double neighbor_ratio,
                               double distance_floor, std::optional<double> w0,
                               double label_scale, double label_offset) {
  ConsensusConfig cc;
  cc.mode = consensus_mode_from_string(mode);
  cc.neighbor_ratio = neighbor_ratio;
  cc.distance_floor = distance_floor;
  cc.w0_override = w0;
  cc.label_scale = label_scale;
  cc.label_offset = label_offset;
  return cc;
}

InitialEstimate builtin_estimate(const VideoVolume& video, const MvsoParams& params,
                                 int flow_patch, int flow_radius, int flow_levels) {
  FlowParams fp;
  fp.patch = flow_patch;
  fp.radius = flow_radius;
  fp.levels = flow_levels;

  std::vector<Grid2<Rgb8>> frames;
  frames.reserve(static_cast<std::size_t>(video.frames()));
  for (int t = 0; t < video.frames(); ++t) {
    Grid2<Rgb8> f(video.height(), video.width());
    const Rgb8* src = video.data() + static_cast<std::size_t>(t) * f.size();
    std::copy(src, src + f.size(), f.data());
    frames.push_back(std::move(f));
  }

  std::vector<FlowField> flows;
  std::vector<SaliencyMap> sal;
  for (int t = 0; t + 1 < video.frames(); ++t)
    flows.push_back(estimate_flow(frames[static_cast<std::size_t>(t)],
                                  frames[static_cast<std::size_t>(t) + 1], fp));
  for (int t = 0; t < video.frames(); ++t)
    sal.push_back(estimate_saliency(frames[static_cast<std::size_t>(t)]));
  return compute_initial_estimate(flows, sal, params);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "video object segmentation by supervoxel consensus";

  m.def(
      "rgb_to_lab",
      [](int r, int g, int b) {
        if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
          throw py::value_error("channel values must be in [0, 255]");
        const Lab lab = rgb_to_lab({static_cast<std::uint8_t>(r),
                                    static_cast<std::uint8_t>(g),
                                    static_cast<std::uint8_t>(b)});
        return py::make_tuple(lab.l, lab.a, lab.b);
      },
      py::arg("r"), py::arg("g"), py::arg("b"), "sRGB 8-bit to CIELAB (D65)");

  m.def("quartiles", &quartiles, py::arg("data"),
        "(q1, q2, q3) with linear interpolation");

  m.def(
      "tukey_outliers",
      [](const std::vector<double>& data, double k) {
        std::vector<std::uint8_t> mask;
        const OutlierSummary s = tukey_summary(data, k, &mask);
        py::dict out;
        out["q1"] = s.q1;
        out["q2"] = s.q2;
        out["q3"] = s.q3;
        out["o1"] = s.o1;
        out["o3"] = s.o3;
        out["alpha"] = s.alpha;
        py::array_t<bool> flags(static_cast<py::ssize_t>(mask.size()));
        for (std::size_t i = 0; i < mask.size(); ++i) flags.mutable_data()[i] = mask[i] != 0;
        out["outliers"] = flags;
        return out;
      },
      py::arg("data"), py::arg("k") = 1.5,
      "quartiles, fences, outlier flags and the outlier scale");

  m.def(
      "estimate_flow",
      [](const CArray<std::uint8_t>& a, const CArray<std::uint8_t>& b, int patch, int radius,
         int levels) {
        FlowParams p;
        p.patch = patch;
        p.radius = radius;
        p.levels = levels;
        const FlowField f = estimate_flow(frame_from_array(a), frame_from_array(b), p);
        return py::make_tuple(grid2_to_array(f.u), grid2_to_array(f.v));
      },
      py::arg("a"), py::arg("b"), py::arg("patch") = 8, py::arg("radius") = 8,
      py::arg("levels") = 3, "coarse-to-fine block-matching flow, returns (u, v)");

  m.def(
      "estimate_saliency",
      [](const CArray<std::uint8_t>& frame) {
        return grid2_to_array(estimate_saliency(frame_from_array(frame)));
      },
      py::arg("frame"), "center-surround color contrast, normalized to [0, 1]");

  m.def(
      "initial_estimate",
      [](const CArray<std::uint8_t>& video, double tukey_k, bool magnitude_sqrt,
         bool scale_per_video, int connectivity, int flow_patch, int flow_radius,
         int flow_levels) {
        const VideoVolume v = video_from_array(video);
        const MvsoParams p = make_params(tukey_k, magnitude_sqrt, scale_per_video, connectivity);
        return estimate_to_dict(builtin_estimate(v, p, flow_patch, flow_radius, flow_levels));
      },
      py::arg("video"), py::arg("tukey_k") = 1.5, py::arg("magnitude_sqrt") = false,
      py::arg("scale_per_video") = false, py::arg("connectivity") = 8,
      py::arg("flow_patch") = 8, py::arg("flow_radius") = 8, py::arg("flow_levels") = 3,
      "built-in cues plus the saliency-outlier initial estimate");

  m.def(
      "initial_estimate_from_cues",
      [](const CArray<double>& flow_u, const CArray<double>& flow_v,
         const CArray<double>& saliency, double tukey_k, bool magnitude_sqrt,
         bool scale_per_video, int connectivity) {
        const auto flows = flows_from_arrays(flow_u, flow_v);
        const auto sal = saliency_from_array(saliency);
        const MvsoParams p = make_params(tukey_k, magnitude_sqrt, scale_per_video, connectivity);
        return estimate_to_dict(compute_initial_estimate(flows, sal, p));
      },
      py::arg("flow_u"), py::arg("flow_v"), py::arg("saliency"), py::arg("tukey_k") = 1.5,
      py::arg("magnitude_sqrt") = false, py::arg("scale_per_video") = false,
      py::arg("connectivity") = 8,
      "initial estimate from precomputed flow (T-1, H, W) and saliency (T, H, W)");

  m.def(
      "supervoxels",
      [](const CArray<std::uint8_t>& video, double k, int min_size, int levels) {
        const VideoVolume v = video_from_array(video);
        const SupervoxelHierarchy h = build_hierarchy(segment_level0(v, k, min_size), v, levels);
        py::list out;
        for (const SupervoxelLabeling& l : h.levels) out.append(grid3_to_array(l.labels));
        return out;
      },
      py::arg("video"), py::arg("k") = 150.0, py::arg("min_size") = 100,
      py::arg("levels") = 6, "hierarchical supervoxel labelings, finest first");

  m.def(
      "consensus_masks",
      [](const CArray<std::uint8_t>& video, const CArray<std::int32_t>& labels,
         const CArray<std::uint8_t>& m0, const CArray<double>& f0_scaled,
         const std::string& mode, double neighbor_ratio, double distance_floor,
         std::optional<double> w0, double label_scale, double label_offset, int connectivity,
         int threads) {
        const VideoVolume v = video_from_array(video);
        const SupervoxelLabeling l =
            labeling_from_grid(grid3_from_array<std::int32_t>(labels, "labels"));
        const MaskSequence m0g = masks_from_array(m0, "m0");
        Grid3<double> f0 = grid3_from_array<double>(f0_scaled, "f0_scaled");
        ScoreField f0_field(f0.frames(), f0.height(), f0.width(), 0.0, 1.0);
        f0_field.values = std::move(f0);

        const ConsensusConfig cc = make_consensus(mode, neighbor_ratio, distance_floor, w0,
                                                  label_scale, label_offset);
        const SupervoxelStats stats = compute_stats(v, l, m0g, cc);
        const ScoreField f_sc = consensus_field(l, stats, cc, threads);
        const ScoreField f = final_measure(f0_field, f_sc);
        return grid3_to_array(final_mask(f, connectivity));
      },
      py::arg("video"), py::arg("labels"), py::arg("m0"), py::arg("f0_scaled"),
      py::arg("mode") = "both", py::arg("neighbor_ratio") = 0.1,
      py::arg("distance_floor") = 1e-6, py::arg("w0") = std::nullopt,
      py::arg("label_scale") = 2.0, py::arg("label_offset") = -1.0,
      py::arg("connectivity") = 8, py::arg("threads") = 1,
      "supervoxel consensus refinement of an initial estimate");

  m.def(
      "segment_video",
      [](const CArray<std::uint8_t>& video, const std::string& mode, int level,
         int downscale_factor, double k, int min_size, int levels, double neighbor_ratio,
         std::optional<double> w0, int connectivity, double tukey_k) {
        const VideoVolume v = video_from_array(video);
        const MvsoParams params = make_params(tukey_k, false, false, connectivity);
        const InitialEstimate initial = builtin_estimate(v, params, 8, 8, 3);
        if (mode == "none") return grid3_to_array(initial.m0);

        const VideoVolume reduced = downscale_volume(v, downscale_factor);
        const int depth = std::max(levels, level + 1);
        const SupervoxelHierarchy h =
            build_hierarchy(segment_level0(reduced, k, min_size), reduced, depth);
        const int used = std::min(level, h.level_count() - 1);
        const LabelGrid& at_reduced = h.levels[static_cast<std::size_t>(used)].labels;
        const SupervoxelLabeling labeling =
            labeling_from_grid(upscale_labels(at_reduced, v.height(), v.width()));

        ConsensusConfig cc = make_consensus(mode, neighbor_ratio, 1e-6, w0, 2.0, -1.0);
        const SupervoxelStats stats = compute_stats(v, labeling, initial.m0, cc);
        const ScoreField f_sc = consensus_field(labeling, stats, cc, 1);
        const ScoreField f = final_measure(initial.f0_scaled, f_sc);
        return grid3_to_array(final_mask(f, connectivity));
      },
      py::arg("video"), py::arg("mode") = "both", py::arg("level") = 0,
      py::arg("downscale_factor") = 4, py::arg("k") = 150.0, py::arg("min_size") = 100,
      py::arg("levels") = 6, py::arg("neighbor_ratio") = 0.1, py::arg("w0") = std::nullopt,
      py::arg("connectivity") = 8, py::arg("tukey_k") = 1.5,
      "end-to-end segmentation of an in-memory video, returns (T, H, W) uint8 masks");

  m.def(
      "jaccard",
      [](const CArray<std::uint8_t>& a, const CArray<std::uint8_t>& b) {
        return jaccard(mask_frame_from_array(a, "a"), mask_frame_from_array(b, "b"));
      },
      py::arg("a"), py::arg("b"), "region intersection over union");

  m.def(
      "boundary_f",
      [](const CArray<std::uint8_t>& a, const CArray<std::uint8_t>& b, double tol) {
        return boundary_f(mask_frame_from_array(a, "a"), mask_frame_from_array(b, "b"), tol);
      },
      py::arg("a"), py::arg("b"), py::arg("tol") = 0.008,
      "boundary F measure with a diagonal-relative tolerance");

  m.def(
      "downscale",
      [](const CArray<std::uint8_t>& video, int factor) {
        const VideoVolume small = downscale_volume(video_from_array(video), factor);
        py::array_t<std::uint8_t> out(
            {small.frames(), small.height(), small.width(), 3});
        std::uint8_t* p = out.mutable_data();
        const Rgb8* src = small.data();
        for (std::size_t i = 0; i < small.voxel_count(); ++i) {
          *p++ = src[i].r;
          *p++ = src[i].g;
          *p++ = src[i].b;
        }
        return out;
      },
      py::arg("video"), py::arg("factor"), "integer box-filter downscale");
}
