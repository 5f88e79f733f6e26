#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "translink/core.hpp"
#include "translink/ingest.hpp"
#include "translink/match.hpp"
#include "translink/metrics.hpp"

namespace translink {

enum class AnomalyKind {
  HighTransferPct,
  SpanCrossing,
  SequentialStaging,
  ThroughputDisparity,
  RedundantTransfer,
  ZeroDuration,
};

std::string_view anomaly_kind_name(AnomalyKind k);

// Evidence payloads carry enough data to re-derive each detection decision.

struct HighTransferPctEvidence {
  double threshold = 0.0;
  double transfer_pct = 0.0;
};

struct SpanCrossingEvidence {
  TransferId transferid = 0;
  std::int64_t queuing_overlap_seconds = 0;
  std::int64_t wall_overlap_seconds = 0;
};

struct SequentialStagingEvidence {
  std::vector<TransferId> transferids;  // pairwise disjoint intervals
};

struct ThroughputDisparityEvidence {
  double ratio = 0.0;
  double threshold = 0.0;
  TransferId fastest = 0;
  TransferId slowest = 0;
};

struct ZeroDurationEvidence {
  std::vector<TransferId> transferids;
};

/// One redundancy episode: transfers of the same files from the same source
/// site, grouped by (dataset, scope, sourcesite). Pairs with an inferred_site
/// re-identify an UNKNOWN destination from a sibling with a known one; pairs
/// without are plain repeats between known endpoints.
struct RedundantTransferEvidence {
  std::string dataset;
  std::string scope;
  SiteName sourcesite;

  struct Pair {
    TransferId transferid = 0;            // the redundant / unidentified member
    TransferId reference_transferid = 0;  // the earlier known-endpoint member
    std::optional<SiteName> inferred_site;
  };
  std::vector<Pair> pairs;
};

using AnomalyEvidence =
    std::variant<HighTransferPctEvidence, SpanCrossingEvidence, SequentialStagingEvidence,
                 ThroughputDisparityEvidence, ZeroDurationEvidence,
                 RedundantTransferEvidence>;

/// pandaid is 0 for detections not tied to a single job (redundant-transfer
/// episodes range over the whole catalog).
struct AnomalyFlag {
  PandaId pandaid = 0;
  AnomalyKind kind = AnomalyKind::HighTransferPct;
  AnomalyEvidence evidence;
};

/// Jobs whose transfer-time percentage strictly exceeds the threshold.
std::vector<AnomalyFlag> flag_high_transfer_pct(const std::vector<QueueBreakdown>& breakdowns,
                                                double threshold);

/// Transfers overlapping both the queuing and the wall interval of their job
/// (positive measure on each side). Direct-IO transfers are exempt: streaming
/// overlap with execution is expected behavior.
std::vector<AnomalyFlag> detect_span_crossing(const JobRecord& job,
                                              const TransferCatalog& catalog,
                                              const std::vector<TransferId>& transferids);

/// Flags the job when its >= 2 matched transfer intervals are pairwise
/// disjoint, evidencing serialized staging.
std::vector<AnomalyFlag> detect_sequential_staging(const JobRecord& job,
                                                   const TransferCatalog& catalog,
                                                   const std::vector<TransferId>& transferids);

/// Flags the job when max/min throughput over its matched set reaches
/// ratio_threshold. Any zero-duration member yields a ZeroDuration flag
/// instead of a ratio.
std::vector<AnomalyFlag> detect_throughput_disparity(
    const JobRecord& job, const TransferCatalog& catalog,
    const std::vector<TransferId>& transferids, double ratio_threshold);

/// Groups transfers by (lfn, dataset, scope, filesize, sourcesite) — block
/// ids intentionally omitted so re-transfers registered under different
/// blocks still group — then pairs UNKNOWN destinations with a known-
/// destination sibling (site inference) and repeats between identical known
/// endpoints (avoidable redundancy). One flag per (dataset, scope,
/// sourcesite) episode.
std::vector<AnomalyFlag> detect_redundant_transfers(const TransferCatalog& catalog);

struct AnomalyConfig {
  double pct_threshold = 0.75;
  double ratio_threshold = 10.0;
};

/// All detectors over a match report, output sorted by (pandaid, kind).
std::vector<AnomalyFlag> run_detectors(const JobCatalog& jobs,
                                       const TransferCatalog& transfers,
                                       const MatchingReport& report,
                                       const std::vector<QueueBreakdown>& breakdowns,
                                       const AnomalyConfig& config);

}  // namespace translink
