#pragma once

#include <array>
#include <optional>
#include <vector>

#include "svxgerry/core.hpp"
#include "svxgerry/cues.hpp"

namespace svxgerry {

struct MvsoParams {
  double tukey_k = 1.5;
  bool magnitude_sqrt = false;  // default keeps magnitude = x^2 + y^2
  bool scale_per_video = false; // default scales f0 per frame
  int connectivity = 8;         // mask component connectivity
};

/// Per-frame flow decomposition: x, y, magnitude, angle.
struct FlowComponents {
  Grid3<double> x, y, magnitude, angle;

  int frames() const { return x.frames(); }
  const Grid3<double>& component(int i) const {
    switch (i) {
      case 0: return x;
      case 1: return y;
      case 2: return magnitude;
      default: return angle;
    }
  }
};

/// The seven per-pixel saliency measures: four motion, three visual.
struct SaliencyMeasures {
  std::array<Grid3<double>, 4> motion;
  std::array<Grid3<double>, 3> visual;
};

struct InitialEstimate {
  ScoreField f0;         // raw sums, >= 0
  ScoreField f0_scaled;  // [0,1]
  MaskSequence m0;       // <= 1 component per frame
};

/// Expands T-1 flow pairs to per-frame components for T frames; the final
/// frame reuses the last pair. Magnitude is x^2 + y^2 unless sqrt mode is on;
/// angle is atan2(y, x) with angle(0,0) = 0, mapped into (-pi, pi].
FlowComponents flow_components(const std::vector<FlowField>& flows, bool magnitude_sqrt = false);

/// Motion saliency for one flow component: per frame, a pixel scores
/// alpha * |d - Q2| when it is a Tukey outlier and alpha >= 0.5, else 0.
Grid3<double> motion_saliency(const Grid3<double>& component, double tukey_k = 1.5);

/// Visual saliency measure: (d_v)^k times the sum over the four flow
/// components of max(alpha_i, 0.5) * |d_i - Q2_i|, all per frame.
Grid3<double> visual_saliency_measure(const std::vector<SaliencyMap>& vismaps,
                                      const FlowComponents& comps, double k_exponent,
                                      double tukey_k = 1.5);

SaliencyMeasures saliency_measures(const std::vector<SaliencyMap>& vismaps,
                                   const FlowComponents& comps, const MvsoParams& params);

/// Per-pixel sum of all seven measures.
ScoreField initial_foreground(const SaliencyMeasures& measures);

/// Divide by the frame maximum (or video maximum), all-zero input stays zero.
ScoreField scale_f0(const ScoreField& f0, bool per_video = false);

/// Keeps the `max_n` components of `mask` with the largest score sums.
/// Ties: larger pixel count, then earliest top-left pixel in row-major order.
MaskFrame keep_top_components(const MaskFrame& mask, const Grid2<double>& score, int max_n,
                              int connectivity = 8);

/// Threshold one frame: mask = f0 > beta*delta with beta = mean + population
/// std over the frame and delta = 1/2 under the previous mask (1 elsewhere,
/// and everywhere on the first frame), restricted to the single connected
/// component with the greatest score sum.
MaskFrame initial_mask(const Grid2<double>& f0_frame, const MaskFrame* prev,
                       int connectivity = 8);

/// Full initial-estimate chain for one video.
/// flows holds T-1 pairs; vismaps holds T frames.
InitialEstimate compute_initial_estimate(const std::vector<FlowField>& flows,
                                         const std::vector<SaliencyMap>& vismaps,
                                         const MvsoParams& params = {});

}  // namespace svxgerry
