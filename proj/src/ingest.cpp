#include "translink/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace translink {

namespace {

using nlohmann::json;

bool all_whitespace(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

// Field accessors returning nullopt with a reason pushed by the caller.
std::optional<std::int64_t> get_int(const json& obj, const char* key, std::string& err) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    err = std::string("missing key: ") + key;
    return std::nullopt;
  }
  if (!it->is_number_integer()) {
    err = std::string("not an integer: ") + key;
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

std::optional<std::int64_t> get_nonneg(const json& obj, const char* key, std::string& err) {
  auto v = get_int(obj, key, err);
  if (!v) return std::nullopt;
  if (*v < 0) {
    err = std::string("negative: ") + key;
    return std::nullopt;
  }
  return v;
}

std::optional<std::string> get_string(const json& obj, const char* key, std::string& err) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    err = std::string("missing key: ") + key;
    return std::nullopt;
  }
  if (!it->is_string()) {
    err = std::string("not a string: ") + key;
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<json> parse_line(const std::string& line, std::string& err) {
  json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    err = "parse error";
    return std::nullopt;
  }
  return obj;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw DataError("cannot open input file: " + path.string());
  }
  return in;
}

void require_window(const TimeWindow& window) {
  if (!window.valid()) {
    throw ConfigError("time window must satisfy start < end");
  }
}

}  // namespace

JobCatalog load_jobs(const std::filesystem::path& path, TimeWindow window,
                     const IngestOptions& options) {
  require_window(window);
  std::ifstream in = open_or_throw(path);

  JobCatalog catalog;
  catalog.window = window;

  std::unordered_set<PandaId> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ++catalog.total_lines;
    std::string err;
    if (all_whitespace(line)) {
      catalog.rejects.push_back({lineno, "empty line", false});
      continue;
    }
    auto obj = parse_line(line, err);
    if (!obj) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }

    JobRecord job;
    auto pandaid = get_nonneg(*obj, "pandaid", err);
    auto taskid = get_nonneg(*obj, "jeditaskid", err);
    auto creation = get_nonneg(*obj, "creationtime", err);
    auto start = get_nonneg(*obj, "starttime", err);
    auto end = get_nonneg(*obj, "endtime", err);
    auto site = get_string(*obj, "computingsite", err);
    auto nin = get_nonneg(*obj, "ninputfilebytes", err);
    auto nout = get_nonneg(*obj, "noutputfilebytes", err);
    auto jstatus = get_string(*obj, "jobstatus", err);
    auto tstatus = get_string(*obj, "taskstatus", err);
    if (!pandaid || !taskid || !creation || !start || !end || !site || !nin || !nout ||
        !jstatus || !tstatus) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }

    auto job_status = parse_job_status(*jstatus);
    auto task_status = parse_task_status(*tstatus);
    if (!job_status) {
      catalog.rejects.push_back({lineno, "bad jobstatus: " + *jstatus, false});
      continue;
    }
    if (!task_status) {
      catalog.rejects.push_back({lineno, "bad taskstatus: " + *tstatus, false});
      continue;
    }

    job.pandaid = *pandaid;
    job.jeditaskid = *taskid;
    job.creationtime = Timestamp{*creation};
    job.starttime = Timestamp{*start};
    job.endtime = Timestamp{*end};
    job.computingsite = normalize_site(*site, options.invalid_site_tokens);
    job.ninputfilebytes = static_cast<std::uint64_t>(*nin);
    job.noutputfilebytes = static_cast<std::uint64_t>(*nout);
    job.jobstatus = *job_status;
    job.taskstatus = *task_status;

    if (!job.time_order_valid()) {
      catalog.rejects.push_back({lineno, "time order", false});
      continue;
    }
    if (!seen_ids.insert(job.pandaid).second) {
      catalog.rejects.push_back({lineno, "duplicate pandaid", false});
      continue;
    }
    if (job.creationtime < window.start || job.endtime > window.end) {
      ++catalog.window_dropped;
      continue;
    }
    catalog.records.push_back(std::move(job));
  }

  std::stable_sort(catalog.records.begin(), catalog.records.end(),
                   [](const JobRecord& a, const JobRecord& b) { return a.pandaid < b.pandaid; });
  return catalog;
}

FileCatalog load_files(const std::filesystem::path& path, const IngestOptions&) {
  std::ifstream in = open_or_throw(path);

  FileCatalog catalog;
  std::unordered_map<std::string, std::size_t> seen_keys;  // key -> first line

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ++catalog.total_lines;
    std::string err;
    if (all_whitespace(line)) {
      catalog.rejects.push_back({lineno, "empty line", false});
      continue;
    }
    auto obj = parse_line(line, err);
    if (!obj) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }

    FileRecord file;
    auto pandaid = get_nonneg(*obj, "pandaid", err);
    auto taskid = get_nonneg(*obj, "jeditaskid", err);
    auto lfn = get_string(*obj, "lfn", err);
    auto dataset = get_string(*obj, "dataset", err);
    auto proddblock = get_string(*obj, "proddblock", err);
    auto scope = get_string(*obj, "scope", err);
    auto filesize = get_nonneg(*obj, "filesize", err);
    if (!pandaid || !taskid || !lfn || !dataset || !proddblock || !scope || !filesize) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }
    if (lfn->empty()) {
      catalog.rejects.push_back({lineno, "empty lfn", false});
      continue;
    }
    if (scope->empty()) {
      catalog.rejects.push_back({lineno, "empty scope", false});
      continue;
    }

    file.pandaid = *pandaid;
    file.jeditaskid = *taskid;
    file.lfn = std::move(*lfn);
    file.dataset = std::move(*dataset);
    file.proddblock = std::move(*proddblock);
    file.scope = std::move(*scope);
    file.filesize = static_cast<std::uint64_t>(*filesize);

    const std::string key =
        std::to_string(file.pandaid) + '\x1f' + file.lfn + '\x1f' + file.scope;
    auto [it, inserted] = seen_keys.emplace(key, lineno);
    if (!inserted) {
      catalog.rejects.push_back(
          {lineno, "duplicate (pandaid, lfn, scope), first at line " +
                       std::to_string(it->second),
           true});
    }
    catalog.records.push_back(std::move(file));
  }

  std::stable_sort(catalog.records.begin(), catalog.records.end(),
                   [](const FileRecord& a, const FileRecord& b) {
                     return std::tie(a.pandaid, a.jeditaskid, a.scope, a.lfn) <
                            std::tie(b.pandaid, b.jeditaskid, b.scope, b.lfn);
                   });
  return catalog;
}

TransferCatalog load_transfers(const std::filesystem::path& path, TimeWindow window,
                               const IngestOptions& options) {
  require_window(window);
  std::ifstream in = open_or_throw(path);

  TransferCatalog catalog;
  catalog.window = window;

  std::string line;
  std::size_t lineno = 0;
  TransferId next_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ++catalog.total_lines;
    std::string err;
    if (all_whitespace(line)) {
      catalog.rejects.push_back({lineno, "empty line", false});
      continue;
    }
    auto obj = parse_line(line, err);
    if (!obj) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }

    TransferRecord t;
    auto lfn = get_string(*obj, "lfn", err);
    auto dataset = get_string(*obj, "dataset", err);
    auto proddblock = get_string(*obj, "proddblock", err);
    auto scope = get_string(*obj, "scope", err);
    auto filesize = get_nonneg(*obj, "filesize", err);
    auto start = get_nonneg(*obj, "starttime", err);
    auto end = get_nonneg(*obj, "endtime", err);
    auto source = get_string(*obj, "sourcesite", err);
    auto dest = get_string(*obj, "destinationsite", err);
    auto activity = get_string(*obj, "activity", err);
    if (!lfn || !dataset || !proddblock || !scope || !filesize || !start || !end ||
        !source || !dest || !activity) {
      catalog.rejects.push_back({lineno, err, false});
      continue;
    }
    if (lfn->empty()) {
      catalog.rejects.push_back({lineno, "empty lfn", false});
      continue;
    }
    if (*end < *start) {
      catalog.rejects.push_back({lineno, "time order", false});
      continue;
    }

    t.lfn = std::move(*lfn);
    t.dataset = std::move(*dataset);
    t.proddblock = std::move(*proddblock);
    t.scope = std::move(*scope);
    t.filesize = static_cast<std::uint64_t>(*filesize);
    t.starttime = Timestamp{*start};
    t.endtime = Timestamp{*end};
    t.sourcesite = normalize_site(*source, options.invalid_site_tokens);
    t.destinationsite = normalize_site(*dest, options.invalid_site_tokens);

    if (auto it = obj->find("jeditaskid"); it != obj->end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        catalog.rejects.push_back({lineno, "not an integer: jeditaskid", false});
        continue;
      }
      t.jeditaskid = it->get<std::int64_t>();
    }

    if (!window.contains(t.starttime)) {
      ++catalog.window_dropped;
      continue;
    }

    auto act = parse_activity(*activity);
    if (act) {
      t.activity = *act;
    } else {
      t.activity = TransferActivity::Other;
      catalog.rejects.push_back({lineno, "unknown activity: " + *activity, true});
    }

    t.transferid = next_id++;
    catalog.records.push_back(std::move(t));
  }
  return catalog;
}

void write_rejects_sidecar(const std::filesystem::path& input_path,
                           const std::vector<RejectEntry>& rejects) {
  const std::filesystem::path out_path = input_path.string() + ".rejects";
  std::ofstream out(out_path, std::ios::trunc);
  if (!out.good()) {
    throw DataError("cannot write rejects sidecar: " + out_path.string());
  }
  for (const auto& r : rejects) {
    json obj;
    obj["line"] = r.line;
    obj["reason"] = r.reason;
    obj["severity"] = r.warning ? "warning" : "reject";
    out << obj.dump() << '\n';
  }
}

}  // namespace translink
