#include "translink/anomaly.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace translink {

namespace {

const TransferRecord& by_id(const TransferCatalog& catalog, TransferId id) {
  return catalog.records[static_cast<std::size_t>(id)];
}

}  // namespace

std::string_view anomaly_kind_name(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::HighTransferPct: return "high_transfer_pct";
    case AnomalyKind::SpanCrossing: return "span_crossing";
    case AnomalyKind::SequentialStaging: return "sequential_staging";
    case AnomalyKind::ThroughputDisparity: return "throughput_disparity";
    case AnomalyKind::RedundantTransfer: return "redundant_transfer";
    case AnomalyKind::ZeroDuration: return "zero_duration";
  }
  return "";
}

std::vector<AnomalyFlag> flag_high_transfer_pct(const std::vector<QueueBreakdown>& breakdowns,
                                                double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("high-transfer-pct threshold must lie in (0, 1]");
  }
  std::vector<AnomalyFlag> flags;
  for (const QueueBreakdown& b : breakdowns) {
    if (b.transfer_pct > threshold) {
      flags.push_back({b.pandaid, AnomalyKind::HighTransferPct,
                       HighTransferPctEvidence{threshold, b.transfer_pct}});
    }
  }
  return flags;
}

std::vector<AnomalyFlag> detect_span_crossing(const JobRecord& job,
                                              const TransferCatalog& catalog,
                                              const std::vector<TransferId>& transferids) {
  std::vector<AnomalyFlag> flags;
  const Interval queuing = job.queuing_interval();
  const Interval wall = job.wall_interval();
  for (TransferId id : transferids) {
    const TransferRecord& t = by_id(catalog, id);
    if (t.activity == TransferActivity::AnalysisDownloadDirectIO) continue;
    const std::int64_t q = interval_overlap(t.interval(), queuing);
    const std::int64_t w = interval_overlap(t.interval(), wall);
    if (q > 0 && w > 0) {
      flags.push_back({job.pandaid, AnomalyKind::SpanCrossing, SpanCrossingEvidence{id, q, w}});
    }
  }
  return flags;
}

std::vector<AnomalyFlag> detect_sequential_staging(const JobRecord& job,
                                                   const TransferCatalog& catalog,
                                                   const std::vector<TransferId>& transferids) {
  std::vector<AnomalyFlag> flags;
  if (transferids.size() < 2) return flags;
  for (std::size_t i = 0; i < transferids.size(); ++i) {
    for (std::size_t j = i + 1; j < transferids.size(); ++j) {
      if (interval_overlap(by_id(catalog, transferids[i]).interval(),
                           by_id(catalog, transferids[j]).interval()) > 0) {
        return flags;
      }
    }
  }
  flags.push_back(
      {job.pandaid, AnomalyKind::SequentialStaging, SequentialStagingEvidence{transferids}});
  return flags;
}

std::vector<AnomalyFlag> detect_throughput_disparity(
    const JobRecord& job, const TransferCatalog& catalog,
    const std::vector<TransferId>& transferids, double ratio_threshold) {
  std::vector<AnomalyFlag> flags;
  if (transferids.size() < 2) return flags;

  std::vector<TransferId> zero_duration;
  for (TransferId id : transferids) {
    if (by_id(catalog, id).interval().duration() <= 0) zero_duration.push_back(id);
  }
  if (!zero_duration.empty()) {
    flags.push_back({job.pandaid, AnomalyKind::ZeroDuration,
                     ZeroDurationEvidence{std::move(zero_duration)}});
    return flags;
  }

  TransferId fastest = transferids.front();
  TransferId slowest = transferids.front();
  double best = -1.0;
  double worst = -1.0;
  for (TransferId id : transferids) {
    const double rate = *throughput(by_id(catalog, id));
    if (best < 0.0 || rate > best) {
      best = rate;
      fastest = id;
    }
    if (worst < 0.0 || rate < worst) {
      worst = rate;
      slowest = id;
    }
  }
  if (worst <= 0.0) return flags;  // all zero-byte transfers; no ratio to take
  const double ratio = best / worst;
  if (ratio >= ratio_threshold) {
    flags.push_back({job.pandaid, AnomalyKind::ThroughputDisparity,
                     ThroughputDisparityEvidence{ratio, ratio_threshold, fastest, slowest}});
  }
  return flags;
}

std::vector<AnomalyFlag> detect_redundant_transfers(const TransferCatalog& catalog) {
  // Fine key identifies one logical file from one source site.
  using FileKey = std::tuple<std::string, std::string, std::string, std::uint64_t, SiteName>;
  std::map<FileKey, std::vector<TransferId>> file_groups;
  for (const TransferRecord& t : catalog.records) {
    file_groups[{t.lfn, t.dataset, t.scope, t.filesize, t.sourcesite}].push_back(t.transferid);
  }

  // Episode key aggregates related file groups into one reported flag.
  using EpisodeKey = std::tuple<std::string, std::string, SiteName>;
  std::map<EpisodeKey, RedundantTransferEvidence> episodes;

  for (auto& [key, ids] : file_groups) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end(), [&](TransferId a, TransferId b) {
      const auto& ta = by_id(catalog, a);
      const auto& tb = by_id(catalog, b);
      if (ta.starttime != tb.starttime) return ta.starttime < tb.starttime;
      return a < b;
    });

    std::vector<RedundantTransferEvidence::Pair> pairs;
    std::map<SiteName, TransferId> first_by_dest;
    TransferId first_known = -1;
    for (TransferId id : ids) {
      const TransferRecord& t = by_id(catalog, id);
      if (t.destinationsite.is_unknown()) continue;
      auto [it, inserted] = first_by_dest.emplace(t.destinationsite, id);
      if (!inserted) {
        pairs.push_back({id, it->second, std::nullopt});
      }
      if (first_known < 0) first_known = id;
    }
    if (first_known >= 0) {
      const SiteName& inferred = by_id(catalog, first_known).destinationsite;
      for (TransferId id : ids) {
        if (by_id(catalog, id).destinationsite.is_unknown()) {
          pairs.push_back({id, first_known, inferred});
        }
      }
    }
    if (pairs.empty()) continue;

    const std::string& dataset = std::get<1>(key);
    const std::string& scope = std::get<2>(key);
    const SiteName& source = std::get<4>(key);
    auto& episode = episodes[{dataset, scope, source}];
    episode.dataset = dataset;
    episode.scope = scope;
    episode.sourcesite = source;
    episode.pairs.insert(episode.pairs.end(), pairs.begin(), pairs.end());
  }

  std::vector<AnomalyFlag> flags;
  for (auto& [key, evidence] : episodes) {
    std::sort(evidence.pairs.begin(), evidence.pairs.end(),
              [](const RedundantTransferEvidence::Pair& a,
                 const RedundantTransferEvidence::Pair& b) {
                return a.transferid < b.transferid;
              });
    flags.push_back({0, AnomalyKind::RedundantTransfer, std::move(evidence)});
  }
  return flags;
}

std::vector<AnomalyFlag> run_detectors(const JobCatalog& jobs,
                                       const TransferCatalog& transfers,
                                       const MatchingReport& report,
                                       const std::vector<QueueBreakdown>& breakdowns,
                                       const AnomalyConfig& config) {
  std::vector<AnomalyFlag> flags = flag_high_transfer_pct(breakdowns, config.pct_threshold);

  std::size_t ji = 0;
  for (const MatchSet& m : report.matches) {
    while (ji < jobs.records.size() && jobs.records[ji].pandaid < m.pandaid) ++ji;
    if (ji == jobs.records.size() || jobs.records[ji].pandaid != m.pandaid) {
      throw DataError("match report references pandaid not present in job catalog: " +
                      std::to_string(m.pandaid));
    }
    const JobRecord& job = jobs.records[ji];
    for (auto&& f : detect_span_crossing(job, transfers, m.transferids)) {
      flags.push_back(std::move(f));
    }
    for (auto&& f : detect_sequential_staging(job, transfers, m.transferids)) {
      flags.push_back(std::move(f));
    }
    for (auto&& f : detect_throughput_disparity(job, transfers, m.transferids,
                                                config.ratio_threshold)) {
      flags.push_back(std::move(f));
    }
  }

  for (auto&& f : detect_redundant_transfers(transfers)) {
    flags.push_back(std::move(f));
  }

  std::stable_sort(flags.begin(), flags.end(), [](const AnomalyFlag& a, const AnomalyFlag& b) {
    if (a.pandaid != b.pandaid) return a.pandaid < b.pandaid;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return flags;
}

}  // namespace translink
