#include "svxgerry/report.hpp"

namespace svxgerry {

namespace {

const char* kCsvHeader =
    "row_type,config,method,level,mode,selection,video,frames,videos,"
    "j_mean,j_recall_frames,j_recall_seqs,j_decay,"
    "f_mean,f_recall_frames,f_recall_seqs,f_decay,"
    "t_instability_proxy,mean_svx_volume,chosen_level,rank,status";

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

void metric_fields(nlohmann::json& m, const ReportRow& r) {
  auto put = [&m](const char* key, const std::optional<double>& v) {
    m[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  put("j_mean", r.j_mean);
  put("j_recall_frames", r.j_recall_frames);
  put("j_decay", r.j_decay);
  put("f_mean", r.f_mean);
  put("f_recall_frames", r.f_recall_frames);
  put("f_decay", r.f_decay);
  put("t_instability_proxy", r.t_instability_proxy);
  put("mean_svx_volume", r.mean_svx_volume);
  if (r.aggregate) {
    put("j_recall_seqs", r.j_recall_seqs);
    put("f_recall_seqs", r.f_recall_seqs);
  }
}

}  // namespace

std::string format_double(double v) { return nlohmann::json(v).dump(); }

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ReportRow& r : rows) {
    const std::string cells[] = {
        r.aggregate ? "aggregate" : "video",
        csv_escape(r.config),
        csv_escape(r.method),
        csv_escape(r.level),
        csv_escape(r.mode),
        csv_escape(r.selection),
        csv_escape(r.video),
        cell(r.frames),
        cell(r.videos),
        cell(r.j_mean),
        cell(r.j_recall_frames),
        cell(r.j_recall_seqs),
        cell(r.j_decay),
        cell(r.f_mean),
        cell(r.f_recall_frames),
        cell(r.f_recall_seqs),
        cell(r.f_decay),
        cell(r.t_instability_proxy),
        cell(r.mean_svx_volume),
        cell(r.chosen_level),
        cell(r.rank),
        csv_escape(r.status)};
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

nlohmann::json report_json(const std::string& kind, const std::string& dataset,
                           const std::vector<ReportRow>& rows) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["tool"] = "svxgerry";
  j["kind"] = kind;
  j["dataset"] = dataset;
  j["notes"] = {
      {"t_instability_proxy",
       "PROXY measure: mean over consecutive frame pairs of (1 - J(m_t, m_t+1)). "
       "Not the DAVIS temporal stability score."},
      {"mean_svx_volume", "Voxels per supervoxel at processing (full) resolution."}};

  nlohmann::json results = nlohmann::json::array();
  nlohmann::json aggregates = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json e;
    e["config"] = r.config;
    e["method"] = r.method;
    e["level"] = r.level;
    e["mode"] = r.mode;
    e["selection"] = r.selection;
    e["status"] = r.status;
    if (r.chosen_level) e["chosen_level"] = *r.chosen_level;
    nlohmann::json m = nlohmann::json::object();
    metric_fields(m, r);
    e["metrics"] = m;
    if (r.aggregate) {
      e["videos"] = r.videos ? nlohmann::json(*r.videos) : nlohmann::json(nullptr);
      e["rank"] = r.rank ? nlohmann::json(*r.rank) : nlohmann::json(nullptr);
      aggregates.push_back(std::move(e));
    } else {
      e["video"] = r.video;
      e["frames"] = r.frames ? nlohmann::json(*r.frames) : nlohmann::json(nullptr);
      results.push_back(std::move(e));
    }
  }
  j["results"] = std::move(results);
  j["aggregates"] = std::move(aggregates);
  return j;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    if (field_started || !field.empty() || !row.empty()) {
      end_field();
      rows.push_back(std::move(row));
      row.clear();
    }
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // the next field exists even if empty
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  end_row();
  return rows;
}

}  // namespace svxgerry
