#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svxgerry/core.hpp"
#include "svxgerry/cues.hpp"
#include "svxgerry/gerrymander.hpp"
#include "svxgerry/metrics.hpp"
#include "svxgerry/mvso.hpp"
#include "svxgerry/report.hpp"
#include "svxgerry/supervoxels.hpp"

namespace svxgerry {

/// Flat configuration shared by all subcommands. Every field has a config
/// file key and a CLI flag of the same name.
struct PipelineConfig {
  std::string input;           // video dir (segment/supervoxels) or dataset root (benchmark)
  std::string output = "out";
  int downscale_factor = 4;    // supervoxel resolution divisor
  std::string cue_source = "builtin";  // builtin | precomputed
  std::string svx_method = "native";   // native | a supervoxels/<name> subdir
  int svx_level = 0;
  std::string mode = "both";   // none | local | nonlocal | both
  double neighbor_ratio = 0.1;
  double distance_floor = 1e-6;
  std::optional<double> w0;    // empty: derived from mode (1, 0, 1/3)
  double tukey_k = 1.5;
  std::string magnitude = "literal";  // literal (x^2+y^2) | sqrt
  double label_scale = 2.0;
  double label_offset = -1.0;
  std::string f0_scaling = "frame";  // frame | video
  int connectivity = 8;        // 4 | 8, for mask components
  double boundary_tol = 0.008; // fraction of the image diagonal
  double native_k = 150.0;     // region-growth threshold scale
  int native_min_size = 100;
  int native_levels = 6;
  int flow_patch = 8;
  int flow_radius = 8;
  int flow_levels = 3;
  int threads = 0;             // 0 = hardware concurrency
  bool write_masks = false;    // benchmark: also write per-config masks
  std::string sweep_methods = "native";
  std::string sweep_levels = "0";
  std::string sweep_modes = "none,local,nonlocal,both";
  std::string level_overrides; // "video:level,video:level"
  bool all_rows = true;        // emit oracle-best level rows when GT present
  std::string masks;           // eval: produced-mask directory
  std::string gt;              // eval: ground-truth directory
};

/// Keys accepted by config files and CLI overrides, in documentation order.
const std::vector<std::string>& config_keys();

/// Applies one key=value pair; throws std::invalid_argument on unknown keys
/// or unparsable values.
void apply_kv(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat key=value text ('#' comments, blank lines allowed) on top of
/// the passed-in config.
void parse_config_text(PipelineConfig& cfg, const std::string& text);

/// Reads a config file on top of defaults.
PipelineConfig load_config_file(const std::filesystem::path& file);

ConsensusConfig consensus_config(const PipelineConfig& cfg, ConsensusMode mode);
MvsoParams mvso_params(const PipelineConfig& cfg);
FlowParams flow_params(const PipelineConfig& cfg);
std::map<std::string, int> parse_level_overrides(const std::string& text);

/// Loaded inputs plus the initial estimate for one video.
struct VideoContext {
  std::string name;
  VideoVolume video;            // full resolution
  VideoVolume reduced;          // supervoxel resolution
  std::vector<std::string> names;  // frame stems
  InitialEstimate initial;
  std::optional<MaskSequence> gt;
};

/// Ingests one video directory and runs cues + the initial estimate.
/// flow_threads parallelizes built-in flow across frame pairs.
VideoContext prepare_video(const PipelineConfig& cfg, const std::filesystem::path& video_dir,
                           int flow_threads);

/// Lazily produces full-resolution supervoxel labelings per (method, level).
class SupervoxelProvider {
 public:
  SupervoxelProvider(const PipelineConfig& cfg, std::filesystem::path video_dir,
                     const VideoVolume& full, const VideoVolume& reduced);

  /// Builds the native hierarchy deep enough for `levels` requests.
  void ensure_native_depth(int n_levels);

  struct Labels {
    SupervoxelLabeling labeling;  // at full resolution
    int level_used = 0;
  };
  /// Native levels clamp to the deepest built level; ingested levels must
  /// exist on disk.
  Labels get(const std::string& method, int level);

 private:
  const PipelineConfig& cfg_;
  std::filesystem::path video_dir_;
  const VideoVolume& full_;
  const VideoVolume& reduced_;
  std::optional<SupervoxelHierarchy> native_;
  int native_depth_ = 0;
};

/// One consensus pass: stats at full resolution, consensus field, final
/// measure and mask.
MaskSequence run_consensus(const PipelineConfig& cfg, const VideoContext& ctx,
                           const SupervoxelLabeling& labels, ConsensusMode mode, int threads);

struct SegmentResult {
  VideoContext ctx;
  MaskSequence masks;
  std::vector<ReportRow> rows;
};

/// `segment`: one video, one configuration; writes masks, the initial mask,
/// and CSV/JSON reports under cfg.output.
SegmentResult run_segment(const PipelineConfig& cfg);

struct BenchmarkResult {
  std::vector<ReportRow> rows;
  std::string csv;
  nlohmann::json json;
};

/// `benchmark`: sweep sweep_methods x sweep_levels x sweep_modes over every
/// video under cfg.input; per-video failures are recorded, not fatal.
/// Writes benchmark_report.csv/.json under cfg.output.
BenchmarkResult run_benchmark(const PipelineConfig& cfg);

/// `eval`: scores cfg.masks against cfg.gt; writes eval_report.csv/.json.
std::vector<ReportRow> run_eval(const PipelineConfig& cfg);

/// `supervoxels`: native hierarchy for one video, exported as RGB label
/// frames per level under cfg.output/<level>/, with a levels.json summary.
nlohmann::json run_supervoxels(const PipelineConfig& cfg);

}  // namespace svxgerry
