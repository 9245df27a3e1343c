#pragma once

#include "svxgerry/core.hpp"

namespace svxgerry {

/// Dense optical flow for one frame pair: per-pixel x and y displacement.
struct FlowField {
  Grid2<double> u;
  Grid2<double> v;

  FlowField() = default;
  FlowField(int height, int width) : u(height, width), v(height, width) {}

  int height() const { return u.height(); }
  int width() const { return u.width(); }
  bool same_shape(const FlowField& o) const { return u.same_shape(o.u); }
};

/// Per-pixel visual saliency in [0,1].
using SaliencyMap = Grid2<double>;

struct FlowParams {
  int patch = 8;
  int radius = 8;
  int levels = 3;
};

/// Coarse-to-fine block-matching flow (SAD cost on grayscale, ties broken
/// toward zero displacement), median-filtered 3x3 per component. Every level
/// searches two windows: around the upsampled seed and around zero.
FlowField estimate_flow(const Grid2<Rgb8>& a, const Grid2<Rgb8>& b,
                        const FlowParams& params = {});

/// Center-surround contrast: Lab distance between a 3x3 local mean and the
/// global frame mean, min-max normalized to [0,1]. Constant frames map to 0.
SaliencyMap estimate_saliency(const Grid2<Rgb8>& frame);

}  // namespace svxgerry
