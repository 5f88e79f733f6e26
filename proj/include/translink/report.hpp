#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "translink/anomaly.hpp"
#include "translink/core.hpp"
#include "translink/ingest.hpp"
#include "translink/match.hpp"
#include "translink/metrics.hpp"
#include "translink/synthgen.hpp"

namespace translink {

inline constexpr int kOutputSchemaVersion = 1;

// --- record files (one JSON object per line) ---

void write_jobs_file(const std::filesystem::path& path, const std::vector<JobRecord>& jobs);
void write_files_file(const std::filesystem::path& path, const std::vector<FileRecord>& files);
void write_transfers_file(const std::filesystem::path& path,
                          const std::vector<TransferRecord>& transfers);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// Header line carries the counts; one line per match set follows. The
/// unmatched id list is summarized as a count, not serialized, so a reread
/// report has an empty unmatched_job_ids vector.
void write_matching_report(const std::filesystem::path& path, const MatchingReport& report);
MatchingReport read_matching_report(const std::filesystem::path& path);
std::string matching_report_to_string(const MatchingReport& report);

void write_flags(const std::filesystem::path& path, const std::vector<AnomalyFlag>& flags);

// --- delimiter-separated tables with fixed header rows ---

void write_tier_summary(const std::filesystem::path& dir, const TierSummary& summary,
                        char delimiter = ',');
void write_activity_breakdown(const std::filesystem::path& path,
                              const std::vector<ActivityBreakdownRow>& rows,
                              char delimiter = ',');
void write_queue_breakdowns(const std::filesystem::path& path,
                            const std::vector<QueueBreakdown>& breakdowns,
                            char delimiter = ',');
void write_status_crosstab(const std::filesystem::path& path, const StatusCrosstab& crosstab,
                           char delimiter = ',');
void write_heatmap(const std::filesystem::path& dir, const HeatmapMatrix& heatmap,
                   char delimiter = ',');
void write_bandwidth_series(const std::filesystem::path& dir,
                            const std::vector<BandwidthSeries>& series, char delimiter = ',');
void write_flag_summary(const std::filesystem::path& path,
                        const std::vector<AnomalyFlag>& flags, char delimiter = ',');

/// Plot-ready record for one flagged job: its queuing/wall intervals plus
/// every matched transfer's interval, size, and endpoints.
void write_timeline(const std::filesystem::path& path, const JobRecord& job,
                    const TransferCatalog& transfers, const std::vector<TransferId>& ids);

/// Output-directory manifest naming the emitted files and the schema version.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::int64_t>>& counts,
                    const std::vector<std::string>& files);

// --- score rendering ---

std::string score_to_json(const MatchScore& score);
void print_score(std::ostream& os, const MatchScore& score);

}  // namespace translink
