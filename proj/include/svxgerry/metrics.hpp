#pragma once

#include <vector>

#include "svxgerry/core.hpp"

namespace svxgerry {

/// Intersection over union; 1 when both masks are empty.
double jaccard(const MaskFrame& m, const MaskFrame& g);

/// Boundary F-measure. Boundaries are mask pixels 4-adjacent to background or
/// to the image border; matches count within tol * diagonal (inclusive).
/// Both boundaries empty -> 1; F = 0 when precision + recall = 0.
double boundary_f(const MaskFrame& m, const MaskFrame& g, double tol = 0.008);

/// Squared Euclidean distance to the nearest nonzero pixel (two-pass
/// lower-envelope transform). All-zero input yields a large sentinel value.
Grid2<double> squared_distance_transform(const MaskFrame& features);

struct FrameStats {
  double mean = 0.0;
  double recall = 0.0;  // fraction of entries > 0.5
  double decay = 0.0;   // first temporal quarter mean minus last quarter mean
};

FrameStats sequence_stats(const std::vector<double>& per_frame);

/// Mean over consecutive frame pairs of 1 - jaccard(m_t, m_{t+1}).
/// This is a stand-in for full temporal-stability scoring and is labeled
/// PROXY wherever it is reported.
double temporal_instability_proxy(const MaskSequence& masks);

struct SequenceScore {
  std::vector<double> per_frame_j;
  std::vector<double> per_frame_f;
  double j_mean = 0.0, j_recall = 0.0, j_decay = 0.0;
  double f_mean = 0.0, f_recall = 0.0, f_decay = 0.0;
  double t_proxy = 0.0;
};

SequenceScore score_sequence(const MaskSequence& masks, const MaskSequence& gt,
                             double boundary_tol = 0.008);

}  // namespace svxgerry
