#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "translink/core.hpp"
#include "translink/ingest.hpp"
#include "translink/match.hpp"

namespace translink {

/// Everything the generator needs; (seed, config) fully determine the output.
struct SynthConfig {
  std::uint64_t seed = 1;
  TimeWindow window{Timestamp{1743465600}, Timestamp{1744156800}};  // 8 days

  int site_count = 12;
  std::vector<std::string> site_tiers{"T0", "T1", "T2", "T3"};

  std::int64_t job_count = 200;
  int files_per_job_min = 1;
  int files_per_job_max = 10;

  // Log-uniform file sizes spanning megabytes to tens of gigabytes.
  std::uint64_t file_size_min = 1'000'000;
  std::uint64_t file_size_max = 20'000'000'000;

  double local_transfer_prob = 0.8;
  double upload_job_prob = 0.15;
  double directio_job_prob = 0.1;

  /// Unlinked background transfers per linked transfer; they stress precision
  /// the way the dominant unmatched population does in production feeds.
  double orphan_rate = 0.5;
  double orphan_taskid_prob = 0.0;
  /// Orphan activity weights in all_activities() order.
  std::vector<double> orphan_activity_weights{0.15, 0.05, 0.20, 0.45, 0.10, 0.05};

  // Per-corruption sampling rates; the first three select whole linked jobs
  // (disjointly), drop_taskid_rate samples individual transfers.
  double size_perturb_rate = 0.0;  // per-file attribute size broken; tier-proof
  double size_total_rate = 0.0;    // job byte totals inconsistent; RM1 recovers
  double unknown_site_rate = 0.0;  // tested endpoint erased; RM2 recovers
  double drop_taskid_rate = 0.0;   // population bookkeeping only
  std::uint64_t size_perturb_max_delta = 1024;

  double job_success_prob = 0.8;
  double task_success_prob = 0.85;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// One annotated ground-truth link. `kind` is empty for untouched links;
/// broken_* name the tiers at which the injected corruption severs this link.
struct LinkAnnotation {
  PandaId pandaid = 0;
  TransferId transferid = 0;
  std::string kind;
  bool broken_exact = false;
  bool broken_rm1 = false;
  bool broken_rm2 = false;
  std::optional<SiteName> original_site;  // unknown_site corruptions only

  friend bool operator==(const LinkAnnotation&, const LinkAnnotation&) = default;
};

struct GroundTruth {
  std::uint64_t seed = 0;
  TimeWindow window{};
  std::uint64_t job_count = 0;
  std::uint64_t file_count = 0;
  std::uint64_t transfer_count = 0;
  std::map<PandaId, std::vector<TransferId>> links;
  std::vector<LinkAnnotation> annotations;  // sorted by (pandaid, transferid)

  std::uint64_t link_count() const {
    std::uint64_t n = 0;
    for (const auto& [id, ids] : links) n += ids.size();
    return n;
  }
};

struct Scenario {
  JobCatalog jobs;
  FileCatalog files;
  TransferCatalog transfers;
  GroundTruth truth;
};

/// Generates catalogs plus ground-truth linkage. Every job receives files
/// whose sizes sum exactly to the relevant byte total and transfers that
/// satisfy the exact-tier predicates; with zero corruption the Exact tier
/// recovers every link. Attribute keys never collide across unrelated files.
Scenario generate_scenario(const SynthConfig& config);

/// Applies the configured corruption rates in place, updating the truth
/// annotations to name exactly what each corruption breaks and where.
void inject_corruptions(Scenario& scenario, const SynthConfig& config);

struct ScoreRow {
  std::string kind;
  std::uint64_t links = 0;
  std::uint64_t recovered = 0;
  std::uint64_t inferred_correct = 0;  // unknown_site only

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

/// Link-level quality of a report against ground truth.
struct MatchScore {
  MatchTier tier = MatchTier::Exact;
  std::uint64_t truth_links = 0;
  std::uint64_t reported_links = 0;
  std::uint64_t true_links_found = 0;
  double precision = 1.0;  // 1.0 when nothing was reported
  double recall = 0.0;
  std::vector<ScoreRow> per_corruption;  // sorted by kind
};

/// Throws DataError for empty truth or when the report clearly belongs to a
/// different scenario (job/transfer universe mismatch).
MatchScore score_matching(const MatchingReport& report, const GroundTruth& truth);

/// Parses a `key = value` configuration file; '#' starts a comment. Unknown
/// keys are configuration errors.
SynthConfig load_synth_config(const std::filesystem::path& path);

}  // namespace translink
