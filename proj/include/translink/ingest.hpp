#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "translink/core.hpp"

namespace translink {

/// Common pre-selection window applied to the three metadata streams before
/// matching. Must span at least the end-to-end lifetime of the jobs of
/// interest.
struct TimeWindow {
  Timestamp start;
  Timestamp end;

  bool valid() const { return start < end; }
  bool contains(Timestamp t) const { return start <= t && t <= end; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Audit entry for a line that was rejected (schema/invariant violation) or
/// retained with a warning (duplicates, unrecognized activity).
struct RejectEntry {
  std::size_t line = 0;  // 1-based input line number
  std::string reason;
  bool warning = false;  // warnings describe retained records

  friend bool operator==(const RejectEntry&, const RejectEntry&) = default;
};

/// Immutable, validated record set. Conservation holds per input file:
/// total_lines == records retained + rejects (non-warning) + window_dropped.
template <typename Record>
struct Catalog {
  std::vector<Record> records;
  std::optional<TimeWindow> window;
  std::vector<RejectEntry> rejects;
  std::size_t total_lines = 0;
  std::size_t window_dropped = 0;

  std::size_t rejected_count() const {
    std::size_t n = 0;
    for (const auto& r : rejects) {
      if (!r.warning) ++n;
    }
    return n;
  }
};

using JobCatalog = Catalog<JobRecord>;
using FileCatalog = Catalog<FileRecord>;
using TransferCatalog = Catalog<TransferRecord>;

struct IngestOptions {
  std::unordered_set<std::string> invalid_site_tokens;
};

/// Loads newline-delimited job records. Retains exactly the jobs with
/// creationtime >= window.start and endtime <= window.end (window-complete
/// lifetimes); malformed lines become reject entries, never fatal.
JobCatalog load_jobs(const std::filesystem::path& path, TimeWindow window,
                     const IngestOptions& options = {});

/// Loads file records. No window applies (file records carry no timestamps).
/// Duplicate (pandaid, lfn, scope) lines are retained and flagged as warnings.
FileCatalog load_files(const std::filesystem::path& path,
                       const IngestOptions& options = {});

/// Loads transfer events with starttime inside the window. Sites are
/// normalized, transferid assigned sequentially (0-based) over retained
/// records in file order, and unrecognized activity strings map to Other
/// with a warning.
TransferCatalog load_transfers(const std::filesystem::path& path, TimeWindow window,
                               const IngestOptions& options = {});

/// Writes the audit sidecar next to the input: `<path>.rejects`, one record
/// per line.
void write_rejects_sidecar(const std::filesystem::path& input_path,
                           const std::vector<RejectEntry>& rejects);

}  // namespace translink
