#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace svxgerry {

/// One table row: per-video result or per-config aggregate. Absent optionals
/// render as empty CSV cells / JSON nulls.
struct ReportRow {
  bool aggregate = false;
  std::string config, method, level, mode, selection = "fixed";
  std::string video;  // empty on aggregate rows
  std::optional<int> frames;
  std::optional<int> videos;  // aggregate rows only
  std::optional<double> j_mean, j_recall_frames, j_recall_seqs, j_decay;
  std::optional<double> f_mean, f_recall_frames, f_recall_seqs, f_decay;
  std::optional<double> t_instability_proxy;
  std::optional<double> mean_svx_volume;
  std::optional<int> chosen_level;  // set on oracle-selected rows
  std::optional<int> rank;          // aggregate rows: position by j_mean, 1 = best
  std::string status = "ok";
};

/// Shortest decimal form that parses back to exactly the same double; the
/// same serialization is used in CSV and JSON so the two reports agree
/// value-for-value.
std::string format_double(double v);

std::string report_csv(const std::vector<ReportRow>& rows);
nlohmann::json report_json(const std::string& kind, const std::string& dataset,
                           const std::vector<ReportRow>& rows);

/// RFC-style CSV parsing (quoted cells, embedded commas/quotes/newlines).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace svxgerry
