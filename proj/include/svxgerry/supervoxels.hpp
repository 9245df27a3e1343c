#pragma once

#include <string>
#include <vector>

#include "svxgerry/core.hpp"

namespace svxgerry {

/// A disjoint cover of the voxel grid with dense ids in [0, region_count).
struct SupervoxelLabeling {
  LabelGrid labels;
  int region_count = 0;
  std::vector<long long> voxel_counts;
};

/// levels[0] is the finest; parent[l][i] is the level-(l+1) region containing
/// level-l region i (parent has one entry per consecutive level pair).
struct SupervoxelHierarchy {
  std::vector<SupervoxelLabeling> levels;
  std::vector<std::vector<std::int32_t>> parent;

  int level_count() const { return static_cast<int>(levels.size()); }
};

struct ValidationReport {
  bool valid = true;
  std::string message;
  int region_count = 0;
  std::vector<long long> voxel_counts;
};

struct HierarchyParams {
  int histogram_bins = 20;  // per Lab channel
};

/// Felzenszwalb-Huttenlocher segmentation of the 6-connected spatiotemporal
/// lattice. Edge weight is the Euclidean Lab distance between endpoint
/// voxels; edges are processed in (weight, id, id) order; regions below
/// min_size are merged into their lowest-weight neighbor afterwards.
SupervoxelLabeling segment_level0(const VideoVolume& v, double k_param, int min_size);

/// Iterated region merging: per level, greedily join the adjacent pair with
/// the smallest chi-squared distance between per-channel Lab histograms until
/// the region count halves (floor) or no adjacent pairs remain. Stops early
/// when no merge is possible or one region is left.
SupervoxelHierarchy build_hierarchy(const SupervoxelLabeling& level0, const VideoVolume& v,
                                    int n_levels, const HierarchyParams& params = {});

/// Structural check of any labeling: non-negative ids, dense id range,
/// consistent counts. Never throws; callers decide what to do on failure.
ValidationReport validate_labeling(const LabelGrid& labels);

/// Wraps a raw grid (e.g. ingested colors) after validating it.
/// Throws FormatError when the grid is not a dense disjoint cover.
SupervoxelLabeling labeling_from_grid(LabelGrid labels);

/// Total voxels / region count.
double mean_volume(const SupervoxelLabeling& labeling);
double mean_volume(const SupervoxelHierarchy& h, int level);

}  // namespace svxgerry
