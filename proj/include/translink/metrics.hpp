#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "translink/core.hpp"
#include "translink/ingest.hpp"
#include "translink/match.hpp"

namespace translink {

/// Per-job queuing-phase breakdown. transfer_overlap_seconds is the measure
/// of (union of matched transfer intervals) clipped to the queuing interval,
/// so parallel transfers are never double counted.
struct QueueBreakdown {
  PandaId pandaid = 0;
  std::int64_t queuing_seconds = 0;
  std::int64_t wall_seconds = 0;
  std::int64_t transfer_overlap_seconds = 0;
  double transfer_pct = 0.0;  // overlap / queuing, in [0, 1]
  bool zero_queuing = false;

  friend bool operator==(const QueueBreakdown&, const QueueBreakdown&) = default;
};

/// Measure in seconds of the union of `intervals` intersected with `clip`.
std::int64_t clipped_union_seconds(std::vector<Interval> intervals, Interval clip);

QueueBreakdown transfer_overlap(const JobRecord& job, const TransferCatalog& catalog,
                                const std::vector<TransferId>& transferids);

/// Breakdowns for every matched job in the report, ordered by pandaid.
std::vector<QueueBreakdown> compute_breakdowns(const JobCatalog& jobs,
                                               const MatchingReport& report,
                                               const TransferCatalog& transfers);

/// Bytes per second; nullopt for zero-duration transfers (reported as an
/// anomaly, never as a value).
std::optional<double> throughput(const TransferRecord& t);

struct GeomeanResult {
  std::optional<double> value;   // empty when no positive inputs remain
  std::size_t excluded = 0;      // non-positive inputs dropped
};

/// exp(mean(log x)) over the positive inputs.
GeomeanResult geometric_mean(const std::vector<double>& values);

enum class BandwidthGrouping {
  SitePair,   // all transfers, keyed by (sourcesite, destinationsite)
  LocalSite,  // local transfers only, keyed by their common site
};

/// Accumulated bandwidth usage over fixed-width, epoch-aligned buckets.
struct BandwidthSeries {
  SiteName sourcesite;
  SiteName destinationsite;
  bool single_site = false;
  std::int64_t bucket_seconds = 0;

  struct Bucket {
    Timestamp start;
    std::uint64_t bytes = 0;
    double rate = 0.0;  // bytes / bucket_seconds

    friend bool operator==(const Bucket&, const Bucket&) = default;
  };
  std::vector<Bucket> buckets;  // contiguous, sorted by start
};

/// Spreads each transfer's bytes uniformly over its interval and accumulates
/// per bucket. Allocation is cumulative-rounded so a transfer's bytes sum
/// exactly; zero-duration transfers deposit into the bucket of their start.
/// Groups ordered by (sourcesite, destinationsite).
std::vector<BandwidthSeries> bandwidth_series(
    const std::vector<const TransferRecord*>& transfers, BandwidthGrouping grouping,
    std::int64_t bucket_seconds);

/// Source x destination byte totals. Site order: known sites ascending,
/// UNKNOWN last (present only when some endpoint was unidentified).
struct HeatmapMatrix {
  std::vector<SiteName> sites;
  std::vector<std::uint64_t> cells;  // row-major, cells[src * n + dst]

  std::uint64_t total_bytes = 0;
  std::uint64_t local_bytes = 0;  // diagonal sum
  std::size_t nonzero_cells = 0;
  double arithmetic_mean = 0.0;   // over nonzero cells
  GeomeanResult geometric;        // over nonzero cells

  std::uint64_t cell(std::size_t src, std::size_t dst) const {
    return cells[src * sites.size() + dst];
  }
};

HeatmapMatrix heatmap(const std::vector<TransferRecord>& transfers);

struct ActivityBreakdownRow {
  TransferActivity activity = TransferActivity::Other;
  std::uint64_t matched = 0;
  std::uint64_t total = 0;
  double percentage = 0.0;  // matched / total * 100
  bool empty_class = false;
};

/// Matched vs total transfer counts per activity class. Both columns count
/// transfers carrying a jeditaskid, the population the summary percentages
/// are quoted against.
std::vector<ActivityBreakdownRow> activity_breakdown(const MatchingReport& report,
                                                     const TransferCatalog& transfers);

/// Side-by-side tier comparison: distinct matched transfers split
/// local/remote, matched jobs split by match-set locality.
struct TierSummary {
  struct TransferRow {
    MatchTier tier = MatchTier::Exact;
    std::uint64_t local = 0;
    std::uint64_t remote = 0;
    std::uint64_t total = 0;
    double matched_pct = 0.0;
  };
  struct JobRow {
    MatchTier tier = MatchTier::Exact;
    std::uint64_t all_local = 0;
    std::uint64_t all_remote = 0;
    std::uint64_t mixed = 0;
    std::uint64_t total = 0;
    double matched_pct = 0.0;
  };
  std::vector<TransferRow> transfer_rows;
  std::vector<JobRow> job_rows;
  std::uint64_t transfers_with_taskid = 0;  // transfer-percentage denominator
  std::uint64_t jobs_total = 0;             // job-percentage denominator
};

TierSummary tier_summary(const std::vector<MatchingReport>& reports,
                         const TransferCatalog& transfers, const JobCatalog& jobs);

/// Cumulative matched-job counts at or below each transfer-time-percentage
/// threshold, per (job status, task status) combination.
struct StatusCrosstab {
  static constexpr std::size_t kCombos = 4;
  // Combination order: finished/done, failed/done, finished/failed, failed/failed.
  std::vector<double> thresholds;                    // ascending, in (0, 1]
  std::vector<std::array<std::uint64_t, kCombos>> counts;  // one row per threshold

  static std::size_t combo_index(JobStatus j, TaskStatus t) {
    const std::size_t job_failed = j == JobStatus::Failed ? 1 : 0;
    const std::size_t task_failed = t == TaskStatus::Failed ? 1 : 0;
    return task_failed * 2 + job_failed;
  }
  static std::string_view combo_name(std::size_t index);
};

StatusCrosstab status_crosstab(const JobCatalog& jobs,
                               const std::vector<QueueBreakdown>& breakdowns,
                               std::vector<double> thresholds);

/// Distinct matched transfers of a report, in transferid order.
std::vector<const TransferRecord*> matched_transfers(const MatchingReport& report,
                                                     const TransferCatalog& transfers);

/// Two-decimal percentage, e.g. format_pct(30380, 1585229) == "1.92".
std::string format_pct(std::uint64_t numerator, std::uint64_t denominator);

}  // namespace translink
