#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "svxgerry/core.hpp"
#include "svxgerry/supervoxels.hpp"

namespace svxgerry {

enum class ConsensusMode { LocalOnly, NonlocalOnly, Both };

ConsensusMode consensus_mode_from_string(const std::string& s);
std::string to_string(ConsensusMode mode);

struct ConsensusConfig {
  ConsensusMode mode = ConsensusMode::Both;
  double neighbor_ratio = 0.1;   // fraction of regions used as non-local neighbors
  double distance_floor = 1e-6;  // epsilon guarding 1/R^2
  double label_scale = 2.0;      // vote = scale * m0 + offset
  double label_offset = -1.0;
  std::optional<double> w0_override;  // rarely set; default follows the mode

  double w0() const {
    if (w0_override) return *w0_override;
    switch (mode) {
      case ConsensusMode::LocalOnly: return 1.0;
      case ConsensusMode::NonlocalOnly: return 0.0;
      default: return 1.0 / 3.0;
    }
  }
};

/// Per-region statistics: voxel count, mean color in video-normalized Lab
/// (each channel min-max mapped to [0,1], degenerate channels to 0.5), and
/// the local foreground consensus f_S = mean of (2*m0 - 1) over the region.
struct SupervoxelStats {
  int region_count = 0;
  std::vector<long long> voxel_count;
  std::vector<std::array<double, 3>> mean_lab;
  std::vector<double> local_consensus;
};

SupervoxelStats compute_stats(const VideoVolume& v, const SupervoxelLabeling& l,
                              const MaskSequence& m0,
                              const ConsensusConfig& cfg = ConsensusConfig{});

/// Non-local neighbor count: 0 when there is a single region, otherwise
/// min(N_S - 1, max(1, round(ratio * N_S))).
int nonlocal_neighbor_count(int region_count, double ratio);

/// The N_NL regions nearest to s0 by city-block distance in normalized
/// mean-Lab space (ties by region id), with weights 1/max(R, eps)^2 scaled so
/// they sum to 1 - w0. With no neighbors both vectors are empty.
std::pair<std::vector<int>, std::vector<double>> neighbor_weights(const SupervoxelStats& stats,
                                                                  int s0,
                                                                  const ConsensusConfig& cfg);

/// Per-voxel consensus f_sc = w0 * f_S0 + sum_i w_i * f_Si, constant within
/// each region. Falls back to purely local consensus when a region has no
/// neighbors. Values stay within the vote range ([-1,1] at default scale).
ScoreField consensus_field(const SupervoxelLabeling& l, const SupervoxelStats& stats,
                           const ConsensusConfig& cfg, int threads = 1);

/// f = f0_scaled + f_sc, elementwise.
ScoreField final_measure(const ScoreField& f0_scaled, const ScoreField& f_sc);

/// m = (f > 0), restricted per frame to the two connected components with
/// the greatest summed f.
MaskSequence final_mask(const ScoreField& f, int connectivity = 8);

}  // namespace svxgerry
