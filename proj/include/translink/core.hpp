#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace translink {

using PandaId = std::int64_t;
using TaskId = std::int64_t;
using TransferId = std::int64_t;

/// Raised for invalid configuration or command-line usage (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable or structurally unusable input data (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Seconds since the Unix epoch, UTC. Second granularity is enough for
/// queuing/wall/transfer spans and keeps ordering exact.
struct Timestamp {
  std::int64_t value = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline std::int64_t operator-(Timestamp a, Timestamp b) { return a.value - b.value; }
inline Timestamp operator+(Timestamp t, std::int64_t seconds) { return Timestamp{t.value + seconds}; }

/// Closed time span [start, end] with start <= end.
struct Interval {
  Timestamp start;
  Timestamp end;

  std::int64_t duration() const { return end - start; }
  bool valid() const { return start <= end; }

  friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Overlap length in seconds between two intervals; zero for disjoint or
/// merely touching spans.
std::int64_t interval_overlap(const Interval& a, const Interval& b);

/// Normalized site token. Empty strings, any-case "unknown" and configured
/// invalid tokens all collapse to the UNKNOWN sentinel.
class SiteName {
 public:
  SiteName() = default;  // UNKNOWN

  static SiteName unknown() { return SiteName{}; }

  const std::string& value() const { return value_; }
  bool is_unknown() const { return value_ == kUnknownToken; }

  friend auto operator<=>(const SiteName&, const SiteName&) = default;

  static constexpr const char* kUnknownToken = "UNKNOWN";

 private:
  friend SiteName normalize_site(std::string_view, const std::unordered_set<std::string>&);
  explicit SiteName(std::string v) : value_(std::move(v)) {}

  std::string value_ = kUnknownToken;
};

/// Total function: trims, upper-cases, and maps sentinel/invalid tokens to
/// UNKNOWN. `invalid_tokens` are compared after the same normalization.
SiteName normalize_site(std::string_view raw,
                        const std::unordered_set<std::string>& invalid_tokens = {});

enum class JobStatus { Finished, Failed };
enum class TaskStatus { Done, Failed };

enum class TransferActivity {
  AnalysisDownload,
  AnalysisUpload,
  AnalysisDownloadDirectIO,
  ProductionUpload,
  ProductionDownload,
  Other,
};

std::string_view activity_name(TransferActivity a);
std::optional<TransferActivity> parse_activity(std::string_view name);
std::vector<TransferActivity> all_activities();

std::string_view job_status_name(JobStatus s);
std::string_view task_status_name(TaskStatus s);
std::optional<JobStatus> parse_job_status(std::string_view name);
std::optional<TaskStatus> parse_task_status(std::string_view name);

/// One workload-manager job. creationtime <= starttime <= endtime is enforced
/// at ingest; records violating it never enter a catalog.
struct JobRecord {
  PandaId pandaid = 0;
  TaskId jeditaskid = 0;
  Timestamp creationtime;
  Timestamp starttime;
  Timestamp endtime;
  SiteName computingsite;
  std::uint64_t ninputfilebytes = 0;
  std::uint64_t noutputfilebytes = 0;
  JobStatus jobstatus = JobStatus::Finished;
  TaskStatus taskstatus = TaskStatus::Done;

  bool time_order_valid() const {
    return creationtime <= starttime && starttime <= endtime;
  }
  Interval queuing_interval() const { return {creationtime, starttime}; }
  Interval wall_interval() const { return {starttime, endtime}; }

  friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

/// Bridge entity: carries the job identifiers on one side and the file
/// attributes shared with transfer events on the other.
struct FileRecord {
  PandaId pandaid = 0;
  TaskId jeditaskid = 0;
  std::string lfn;
  std::string dataset;
  std::string proddblock;
  std::string scope;
  std::uint64_t filesize = 0;

  friend bool operator==(const FileRecord&, const FileRecord&) = default;
};

/// One file-transfer event. `transferid` is synthesized at ingest (sequential
/// over retained records in file order) since the raw events carry no stable
/// unique key. Direction is derived from the activity class, never stored.
struct TransferRecord {
  TransferId transferid = 0;
  std::string lfn;
  std::string dataset;
  std::string proddblock;
  std::string scope;
  std::uint64_t filesize = 0;
  Timestamp starttime;
  Timestamp endtime;
  SiteName sourcesite;
  SiteName destinationsite;
  TransferActivity activity = TransferActivity::Other;
  std::optional<TaskId> jeditaskid;

  bool is_download() const {
    return activity == TransferActivity::AnalysisDownload ||
           activity == TransferActivity::AnalysisDownloadDirectIO ||
           activity == TransferActivity::ProductionDownload;
  }
  bool is_upload() const {
    return activity == TransferActivity::AnalysisUpload ||
           activity == TransferActivity::ProductionUpload;
  }
  /// Local means both endpoints identified and identical.
  bool is_local() const {
    return sourcesite == destinationsite && !sourcesite.is_unknown();
  }
  Interval interval() const { return {starttime, endtime}; }

  friend bool operator==(const TransferRecord&, const TransferRecord&) = default;
};

/// Matching tiers, strictly ordered by permissiveness: Exact keeps every
/// criterion, RM1 drops the byte-total check, RM2 additionally tolerates an
/// UNKNOWN site on the direction-tested endpoint.
enum class MatchTier { Exact, RM1, RM2 };

std::string_view tier_name(MatchTier t);
std::optional<MatchTier> parse_tier(std::string_view name);

enum class Locality { AllLocal, AllRemote, Mixed };

std::string_view locality_name(Locality l);
std::optional<Locality> parse_locality(std::string_view name);

/// Site inferred for a transfer whose recorded endpoint was UNKNOWN.
struct SiteInference {
  TransferId transferid = 0;
  SiteName site;

  friend bool operator==(const SiteInference&, const SiteInference&) = default;
};

/// One job paired with its matched transfer events. Transfer ids are sorted
/// ascending by (starttime, transferid). inferred_sites is populated only at
/// RM2, one entry per retained UNKNOWN-endpoint transfer.
struct MatchSet {
  PandaId pandaid = 0;
  MatchTier tier = MatchTier::Exact;
  std::vector<TransferId> transferids;
  Locality locality = Locality::AllLocal;
  std::vector<SiteInference> inferred_sites;

  friend bool operator==(const MatchSet&, const MatchSet&) = default;
};

}  // namespace translink
