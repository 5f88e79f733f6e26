#include "translink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace translink {

std::int64_t clipped_union_seconds(std::vector<Interval> intervals, Interval clip) {
  std::vector<Interval> clipped;
  clipped.reserve(intervals.size());
  for (const Interval& iv : intervals) {
    const std::int64_t lo = std::max(iv.start.value, clip.start.value);
    const std::int64_t hi = std::min(iv.end.value, clip.end.value);
    if (lo < hi) clipped.push_back({Timestamp{lo}, Timestamp{hi}});
  }
  std::sort(clipped.begin(), clipped.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });

  std::int64_t total = 0;
  std::int64_t cursor = clip.start.value;
  for (const Interval& iv : clipped) {
    const std::int64_t lo = std::max(iv.start.value, cursor);
    if (iv.end.value > lo) {
      total += iv.end.value - lo;
      cursor = iv.end.value;
    }
  }
  return total;
}

QueueBreakdown transfer_overlap(const JobRecord& job, const TransferCatalog& catalog,
                                const std::vector<TransferId>& transferids) {
  QueueBreakdown b;
  b.pandaid = job.pandaid;
  b.queuing_seconds = job.queuing_interval().duration();
  b.wall_seconds = job.wall_interval().duration();

  std::vector<Interval> intervals;
  intervals.reserve(transferids.size());
  for (TransferId id : transferids) {
    intervals.push_back(catalog.records[static_cast<std::size_t>(id)].interval());
  }
  b.transfer_overlap_seconds = clipped_union_seconds(std::move(intervals), job.queuing_interval());

  if (b.queuing_seconds == 0) {
    b.zero_queuing = true;
    b.transfer_pct = 0.0;
  } else {
    b.transfer_pct =
        static_cast<double>(b.transfer_overlap_seconds) / static_cast<double>(b.queuing_seconds);
  }
  return b;
}

std::vector<QueueBreakdown> compute_breakdowns(const JobCatalog& jobs,
                                               const MatchingReport& report,
                                               const TransferCatalog& transfers) {
  std::vector<QueueBreakdown> out;
  out.reserve(report.matches.size());
  // Both the job catalog and the match list are ordered by pandaid.
  std::size_t ji = 0;
  for (const MatchSet& m : report.matches) {
    while (ji < jobs.records.size() && jobs.records[ji].pandaid < m.pandaid) ++ji;
    if (ji == jobs.records.size() || jobs.records[ji].pandaid != m.pandaid) {
      throw DataError("match report references pandaid not present in job catalog: " +
                      std::to_string(m.pandaid));
    }
    out.push_back(transfer_overlap(jobs.records[ji], transfers, m.transferids));
  }
  return out;
}

std::optional<double> throughput(const TransferRecord& t) {
  const std::int64_t duration = t.interval().duration();
  if (duration <= 0) return std::nullopt;
  return static_cast<double>(t.filesize) / static_cast<double>(duration);
}

GeomeanResult geometric_mean(const std::vector<double>& values) {
  GeomeanResult r;
  double log_sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (v > 0.0) {
      log_sum += std::log(v);
      ++n;
    } else {
      ++r.excluded;
    }
  }
  if (n > 0) r.value = std::exp(log_sum / static_cast<double>(n));
  return r;
}

std::vector<BandwidthSeries> bandwidth_series(
    const std::vector<const TransferRecord*>& transfers, BandwidthGrouping grouping,
    std::int64_t bucket_seconds) {
  if (bucket_seconds <= 0) {
    throw ConfigError("bucket_seconds must be positive");
  }

  using GroupKey = std::pair<SiteName, SiteName>;
  std::map<GroupKey, std::vector<const TransferRecord*>> groups;
  for (const TransferRecord* t : transfers) {
    if (grouping == BandwidthGrouping::LocalSite) {
      if (!t->is_local()) continue;
      groups[{t->sourcesite, t->sourcesite}].push_back(t);
    } else {
      groups[{t->sourcesite, t->destinationsite}].push_back(t);
    }
  }

  auto bucket_of = [bucket_seconds](std::int64_t sec) {
    // Non-negative timestamps only, so plain division floors.
    return sec / bucket_seconds;
  };

  std::vector<BandwidthSeries> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    BandwidthSeries series;
    series.sourcesite = key.first;
    series.destinationsite = key.second;
    series.single_site = grouping == BandwidthGrouping::LocalSite;
    series.bucket_seconds = bucket_seconds;

    std::int64_t first_bucket = std::numeric_limits<std::int64_t>::max();
    std::int64_t last_bucket = std::numeric_limits<std::int64_t>::min();
    for (const TransferRecord* t : members) {
      first_bucket = std::min(first_bucket, bucket_of(t->starttime.value));
      const std::int64_t end_sec =
          t->endtime.value > t->starttime.value ? t->endtime.value - 1 : t->starttime.value;
      last_bucket = std::max(last_bucket, bucket_of(end_sec));
    }

    series.buckets.resize(static_cast<std::size_t>(last_bucket - first_bucket + 1));
    for (std::size_t i = 0; i < series.buckets.size(); ++i) {
      series.buckets[i].start =
          Timestamp{(first_bucket + static_cast<std::int64_t>(i)) * bucket_seconds};
    }

    for (const TransferRecord* t : members) {
      const std::int64_t s = t->starttime.value;
      const std::int64_t e = t->endtime.value;
      if (e <= s) {
        series.buckets[static_cast<std::size_t>(bucket_of(s) - first_bucket)].bytes +=
            t->filesize;
        continue;
      }
      const double duration = static_cast<double>(e - s);
      std::uint64_t allocated = 0;
      const std::int64_t kb_first = bucket_of(s);
      const std::int64_t kb_last = bucket_of(e - 1);
      for (std::int64_t kb = kb_first; kb <= kb_last; ++kb) {
        const std::int64_t bucket_end = (kb + 1) * bucket_seconds;
        const double covered = static_cast<double>(std::min(e, bucket_end) - s);
        const auto cumulative = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(t->filesize) * covered / duration));
        series.buckets[static_cast<std::size_t>(kb - first_bucket)].bytes +=
            cumulative - allocated;
        allocated = cumulative;
      }
    }

    for (auto& bucket : series.buckets) {
      bucket.rate = static_cast<double>(bucket.bytes) / static_cast<double>(bucket_seconds);
    }
    out.push_back(std::move(series));
  }
  return out;
}

HeatmapMatrix heatmap(const std::vector<TransferRecord>& transfers) {
  std::set<SiteName> known;
  bool has_unknown = false;
  for (const TransferRecord& t : transfers) {
    for (const SiteName* s : {&t.sourcesite, &t.destinationsite}) {
      if (s->is_unknown()) {
        has_unknown = true;
      } else {
        known.insert(*s);
      }
    }
  }

  HeatmapMatrix hm;
  hm.sites.assign(known.begin(), known.end());
  if (has_unknown) hm.sites.push_back(SiteName::unknown());

  std::map<SiteName, std::size_t> index;
  for (std::size_t i = 0; i < hm.sites.size(); ++i) index[hm.sites[i]] = i;

  const std::size_t n = hm.sites.size();
  hm.cells.assign(n * n, 0);
  for (const TransferRecord& t : transfers) {
    hm.cells[index[t.sourcesite] * n + index[t.destinationsite]] += t.filesize;
  }

  std::vector<double> nonzero;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint64_t v = hm.cells[i * n + j];
      hm.total_bytes += v;
      if (i == j) hm.local_bytes += v;
      if (v > 0) nonzero.push_back(static_cast<double>(v));
    }
  }
  hm.nonzero_cells = nonzero.size();
  if (!nonzero.empty()) {
    double sum = 0.0;
    for (double v : nonzero) sum += v;
    hm.arithmetic_mean = sum / static_cast<double>(nonzero.size());
  }
  hm.geometric = geometric_mean(nonzero);
  return hm;
}

std::vector<const TransferRecord*> matched_transfers(const MatchingReport& report,
                                                     const TransferCatalog& transfers) {
  std::set<TransferId> distinct;
  for (const MatchSet& m : report.matches) {
    distinct.insert(m.transferids.begin(), m.transferids.end());
  }
  std::vector<const TransferRecord*> out;
  out.reserve(distinct.size());
  for (TransferId id : distinct) {
    out.push_back(&transfers.records[static_cast<std::size_t>(id)]);
  }
  return out;
}

std::vector<ActivityBreakdownRow> activity_breakdown(const MatchingReport& report,
                                                     const TransferCatalog& transfers) {
  std::map<TransferActivity, std::uint64_t> totals;
  for (const TransferRecord& t : transfers.records) {
    if (t.jeditaskid.has_value()) ++totals[t.activity];
  }

  std::map<TransferActivity, std::uint64_t> matched;
  for (const TransferRecord* t : matched_transfers(report, transfers)) {
    if (t->jeditaskid.has_value()) ++matched[t->activity];
  }

  std::vector<ActivityBreakdownRow> rows;
  for (TransferActivity act : all_activities()) {
    ActivityBreakdownRow row;
    row.activity = act;
    row.matched = matched.count(act) ? matched[act] : 0;
    row.total = totals.count(act) ? totals[act] : 0;
    if (row.total == 0) {
      row.empty_class = true;
      row.percentage = 0.0;
    } else {
      row.percentage =
          100.0 * static_cast<double>(row.matched) / static_cast<double>(row.total);
    }
    rows.push_back(row);
  }
  return rows;
}

TierSummary tier_summary(const std::vector<MatchingReport>& reports,
                         const TransferCatalog& transfers, const JobCatalog& jobs) {
  TierSummary summary;
  summary.jobs_total = jobs.records.size();
  for (const TransferRecord& t : transfers.records) {
    if (t.jeditaskid.has_value()) ++summary.transfers_with_taskid;
  }

  for (const MatchingReport& report : reports) {
    TierSummary::TransferRow trow;
    trow.tier = report.tier;
    for (const TransferRecord* t : matched_transfers(report, transfers)) {
      if (!t->jeditaskid.has_value()) continue;
      (t->is_local() ? trow.local : trow.remote) += 1;
    }
    trow.total = trow.local + trow.remote;
    trow.matched_pct = summary.transfers_with_taskid == 0
                           ? 0.0
                           : 100.0 * static_cast<double>(trow.total) /
                                 static_cast<double>(summary.transfers_with_taskid);
    summary.transfer_rows.push_back(trow);

    TierSummary::JobRow jrow;
    jrow.tier = report.tier;
    for (const MatchSet& m : report.matches) {
      switch (m.locality) {
        case Locality::AllLocal: ++jrow.all_local; break;
        case Locality::AllRemote: ++jrow.all_remote; break;
        case Locality::Mixed: ++jrow.mixed; break;
      }
    }
    jrow.total = jrow.all_local + jrow.all_remote + jrow.mixed;
    jrow.matched_pct = summary.jobs_total == 0
                           ? 0.0
                           : 100.0 * static_cast<double>(jrow.total) /
                                 static_cast<double>(summary.jobs_total);
    summary.job_rows.push_back(jrow);
  }
  return summary;
}

std::string_view StatusCrosstab::combo_name(std::size_t index) {
  switch (index) {
    case 0: return "job_ok_task_ok";
    case 1: return "job_fail_task_ok";
    case 2: return "job_ok_task_fail";
    case 3: return "job_fail_task_fail";
  }
  return "";
}

StatusCrosstab status_crosstab(const JobCatalog& jobs,
                               const std::vector<QueueBreakdown>& breakdowns,
                               std::vector<double> thresholds) {
  for (std::size_t i = 0; i + 1 < thresholds.size(); ++i) {
    if (!(thresholds[i] < thresholds[i + 1])) {
      throw ConfigError("crosstab thresholds must be strictly ascending");
    }
  }
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw ConfigError("crosstab thresholds must lie in (0, 1]");
    }
  }

  StatusCrosstab xt;
  xt.thresholds = std::move(thresholds);
  xt.counts.assign(xt.thresholds.size(), {0, 0, 0, 0});

  std::size_t ji = 0;
  for (const QueueBreakdown& b : breakdowns) {
    while (ji < jobs.records.size() && jobs.records[ji].pandaid < b.pandaid) ++ji;
    if (ji == jobs.records.size() || jobs.records[ji].pandaid != b.pandaid) {
      throw DataError("breakdown references pandaid not present in job catalog: " +
                      std::to_string(b.pandaid));
    }
    const JobRecord& job = jobs.records[ji];
    const std::size_t combo = StatusCrosstab::combo_index(job.jobstatus, job.taskstatus);
    for (std::size_t ti = 0; ti < xt.thresholds.size(); ++ti) {
      // "Below the threshold" is the complement of the strictly-above group
      // used by the high-percentage flagger, so ties land here.
      if (b.transfer_pct <= xt.thresholds[ti]) {
        ++xt.counts[ti][combo];
      }
    }
  }
  return xt;
}

std::string format_pct(std::uint64_t numerator, std::uint64_t denominator) {
  double pct = 0.0;
  if (denominator != 0) {
    pct = 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  return buf;
}

}  // namespace translink
