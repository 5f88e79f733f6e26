#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "translink/core.hpp"
#include "translink/ingest.hpp"

namespace translink {

/// Associative index from (pandaid, jeditaskid) to the job's file records.
/// Holds pointers into the file catalog, which must outlive the index.
class FileIndex {
 public:
  static FileIndex build(const FileCatalog& files);

  /// Files registered for the job, or nullptr when the job has none.
  const std::vector<const FileRecord*>* find(PandaId pandaid, TaskId jeditaskid) const;

  std::size_t bucket_count() const { return buckets_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<PandaId, TaskId>& k) const {
      std::size_t h = std::hash<std::int64_t>{}(k.first);
      h ^= std::hash<std::int64_t>{}(k.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };
  std::unordered_map<std::pair<PandaId, TaskId>, std::vector<const FileRecord*>, KeyHash>
      buckets_;
};

/// Associative index from the shared file attributes
/// (lfn, dataset, proddblock, scope, filesize) to transfer ids. Bucket lists
/// are sorted by (starttime, transferid).
class TransferIndex {
 public:
  static TransferIndex build(const TransferCatalog& transfers);

  /// Transfers whose five attributes equal the file's, or nullptr.
  const std::vector<TransferId>* find(const FileRecord& file) const;

  std::size_t bucket_count() const { return buckets_.size(); }

 private:
  struct Key {
    std::string lfn;
    std::string dataset;
    std::string proddblock;
    std::string scope;
    std::uint64_t filesize = 0;

    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  std::unordered_map<Key, std::vector<TransferId>, KeyHash> buckets_;
};

/// Result of running one matching tier over a job catalog. `matches` is
/// ordered by pandaid; `matched_transfer_count` counts distinct transfer ids
/// (a transfer may belong to several jobs' match sets).
struct MatchingReport {
  MatchTier tier = MatchTier::Exact;
  std::vector<MatchSet> matches;
  std::uint64_t matched_job_count = 0;
  std::uint64_t matched_transfer_count = 0;
  std::vector<PandaId> unmatched_job_ids;
  std::uint64_t total_jobs = 0;
  /// Diagnostic: jobs whose surviving candidate set mixed downloads and
  /// uploads, making the byte-total test span both directions.
  std::uint64_t mixed_direction_jobs = 0;

  friend bool operator==(const MatchingReport&, const MatchingReport&) = default;
};

/// Candidate transfer ids for one job: the union over the job's files of the
/// transfers agreeing on all five shared attributes. Sorted ascending by id.
std::vector<TransferId> candidate_transfers(const JobRecord& job, const FileIndex& files,
                                            const TransferIndex& transfers);

/// Strictest tier. Keeps candidates that started before the job's end and
/// whose direction-tested endpoint equals the computing site, then accepts
/// the surviving set as a whole iff its byte total equals the job's input or
/// output byte count.
std::optional<MatchSet> filter_exact(const JobRecord& job,
                                     const std::vector<TransferId>& candidates,
                                     const TransferCatalog& catalog);

/// Like filter_exact without the byte-total test: any non-empty surviving set
/// is accepted.
std::optional<MatchSet> filter_rm1(const JobRecord& job,
                                   const std::vector<TransferId>& candidates,
                                   const TransferCatalog& catalog);

/// Like filter_rm1 but a transfer also survives when its direction-tested
/// endpoint is UNKNOWN; each such transfer yields an inferred-site entry
/// naming the job's computing site.
std::optional<MatchSet> filter_rm2(const JobRecord& job,
                                   const std::vector<TransferId>& candidates,
                                   const TransferCatalog& catalog);

/// Runs the tier's filter over every job. Per-job work is pure and may be
/// spread across `threads` workers; the report is identical for any thread
/// count.
MatchingReport match_all(const JobCatalog& jobs, const FileCatalog& files,
                         const TransferCatalog& transfers, MatchTier tier,
                         unsigned threads = 1);

/// Reference implementation: unindexed scans applying the tier predicates
/// literally. Intentionally shares no matching code with match_all; reports
/// must be identical wherever both run. Quadratic — small instances only.
MatchingReport brute_force_match(const JobCatalog& jobs, const FileCatalog& files,
                                 const TransferCatalog& transfers, MatchTier tier);

}  // namespace translink
