#include "translink/match.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <thread>

namespace translink {

namespace {

// The transfer catalog is addressable by id: transferid == records index.
const TransferRecord& by_id(const TransferCatalog& catalog, TransferId id) {
  assert(id >= 0 && static_cast<std::size_t>(id) < catalog.records.size());
  assert(catalog.records[static_cast<std::size_t>(id)].transferid == id);
  return catalog.records[static_cast<std::size_t>(id)];
}

Locality classify_locality(const TransferCatalog& catalog,
                           const std::vector<TransferId>& ids) {
  bool any_local = false;
  bool any_remote = false;
  for (TransferId id : ids) {
    (by_id(catalog, id).is_local() ? any_local : any_remote) = true;
  }
  if (any_local && any_remote) return Locality::Mixed;
  return any_local ? Locality::AllLocal : Locality::AllRemote;
}

void sort_by_start_then_id(const TransferCatalog& catalog, std::vector<TransferId>& ids) {
  std::sort(ids.begin(), ids.end(), [&](TransferId a, TransferId b) {
    const auto& ta = by_id(catalog, a);
    const auto& tb = by_id(catalog, b);
    if (ta.starttime != tb.starttime) return ta.starttime < tb.starttime;
    return a < b;
  });
}

struct FilterOutcome {
  std::optional<MatchSet> match;
  bool mixed_direction = false;
};

// Shared predicate pipeline for the indexed path. The tier controls the site
// relaxation and whether the byte-total test applies.
FilterOutcome apply_tier(const JobRecord& job, const std::vector<TransferId>& candidates,
                         const TransferCatalog& catalog, MatchTier tier) {
  FilterOutcome out;
  std::vector<TransferId> surviving;
  std::vector<SiteInference> inferred;
  std::uint64_t byte_total = 0;
  bool any_download = false;
  bool any_upload = false;

  for (TransferId id : candidates) {
    const TransferRecord& t = by_id(catalog, id);
    if (!(t.starttime < job.endtime)) continue;

    const bool is_down = t.is_download();
    const bool is_up = t.is_upload();
    if (!is_down && !is_up) continue;

    const SiteName& tested = is_down ? t.destinationsite : t.sourcesite;
    bool site_ok = tested == job.computingsite;
    bool inferred_here = false;
    if (!site_ok && tier == MatchTier::RM2 && tested.is_unknown()) {
      site_ok = true;
      inferred_here = true;
    }
    if (!site_ok) continue;

    surviving.push_back(id);
    byte_total += t.filesize;
    any_download |= is_down;
    any_upload |= is_up;
    if (inferred_here) inferred.push_back({id, job.computingsite});
  }

  out.mixed_direction = any_download && any_upload;
  if (surviving.empty()) return out;
  if (tier == MatchTier::Exact && byte_total != job.ninputfilebytes &&
      byte_total != job.noutputfilebytes) {
    return out;
  }

  sort_by_start_then_id(catalog, surviving);
  std::sort(inferred.begin(), inferred.end(),
            [](const SiteInference& a, const SiteInference& b) {
              return a.transferid < b.transferid;
            });

  MatchSet m;
  m.pandaid = job.pandaid;
  m.tier = tier;
  m.locality = classify_locality(catalog, surviving);
  m.transferids = std::move(surviving);
  if (tier == MatchTier::RM2) m.inferred_sites = std::move(inferred);
  out.match = std::move(m);
  return out;
}

void finalize_report(MatchingReport& report) {
  report.matched_job_count = report.matches.size();
  std::set<TransferId> distinct;
  for (const auto& m : report.matches) {
    distinct.insert(m.transferids.begin(), m.transferids.end());
  }
  report.matched_transfer_count = distinct.size();
}

}  // namespace

FileIndex FileIndex::build(const FileCatalog& files) {
  FileIndex index;
  for (const FileRecord& f : files.records) {
    index.buckets_[{f.pandaid, f.jeditaskid}].push_back(&f);
  }
  return index;
}

const std::vector<const FileRecord*>* FileIndex::find(PandaId pandaid,
                                                      TaskId jeditaskid) const {
  auto it = buckets_.find({pandaid, jeditaskid});
  return it == buckets_.end() ? nullptr : &it->second;
}

std::size_t TransferIndex::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::string>{}(k.lfn);
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(std::hash<std::string>{}(k.dataset));
  mix(std::hash<std::string>{}(k.proddblock));
  mix(std::hash<std::string>{}(k.scope));
  mix(std::hash<std::uint64_t>{}(k.filesize));
  return h;
}

TransferIndex TransferIndex::build(const TransferCatalog& transfers) {
  TransferIndex index;
  for (const TransferRecord& t : transfers.records) {
    index.buckets_[Key{t.lfn, t.dataset, t.proddblock, t.scope, t.filesize}].push_back(
        t.transferid);
  }
  for (auto& [key, ids] : index.buckets_) {
    std::sort(ids.begin(), ids.end(), [&](TransferId a, TransferId b) {
      const auto& ta = by_id(transfers, a);
      const auto& tb = by_id(transfers, b);
      if (ta.starttime != tb.starttime) return ta.starttime < tb.starttime;
      return a < b;
    });
  }
  return index;
}

const std::vector<TransferId>* TransferIndex::find(const FileRecord& file) const {
  auto it =
      buckets_.find(Key{file.lfn, file.dataset, file.proddblock, file.scope, file.filesize});
  return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<TransferId> candidate_transfers(const JobRecord& job, const FileIndex& files,
                                            const TransferIndex& transfers) {
  std::vector<TransferId> out;
  const auto* bucket = files.find(job.pandaid, job.jeditaskid);
  if (bucket == nullptr) return out;
  for (const FileRecord* f : *bucket) {
    if (const auto* ids = transfers.find(*f)) {
      out.insert(out.end(), ids->begin(), ids->end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<MatchSet> filter_exact(const JobRecord& job,
                                     const std::vector<TransferId>& candidates,
                                     const TransferCatalog& catalog) {
  return apply_tier(job, candidates, catalog, MatchTier::Exact).match;
}

std::optional<MatchSet> filter_rm1(const JobRecord& job,
                                   const std::vector<TransferId>& candidates,
                                   const TransferCatalog& catalog) {
  return apply_tier(job, candidates, catalog, MatchTier::RM1).match;
}

std::optional<MatchSet> filter_rm2(const JobRecord& job,
                                   const std::vector<TransferId>& candidates,
                                   const TransferCatalog& catalog) {
  return apply_tier(job, candidates, catalog, MatchTier::RM2).match;
}

MatchingReport match_all(const JobCatalog& jobs, const FileCatalog& files,
                         const TransferCatalog& transfers, MatchTier tier,
                         unsigned threads) {
  const FileIndex file_index = FileIndex::build(files);
  const TransferIndex transfer_index = TransferIndex::build(transfers);

  const std::size_t n = jobs.records.size();
  std::vector<FilterOutcome> outcomes(n);

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const JobRecord& job = jobs.records[i];
      const auto candidates = candidate_transfers(job, file_index, transfer_index);
      outcomes[i] = apply_tier(job, candidates, transfers, tier);
    }
  };

  if (threads <= 1 || n < 2) {
    worker(0, n);
  } else {
    const unsigned worker_count = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    const std::size_t chunk = (n + worker_count - 1) / worker_count;
    for (unsigned w = 0; w < worker_count; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  MatchingReport report;
  report.tier = tier;
  report.total_jobs = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes[i].mixed_direction) ++report.mixed_direction_jobs;
    if (outcomes[i].match) {
      report.matches.push_back(std::move(*outcomes[i].match));
    } else {
      report.unmatched_job_ids.push_back(jobs.records[i].pandaid);
    }
  }
  finalize_report(report);
  return report;
}

// Everything below re-derives the matching relation from first principles so
// the two code paths can check each other. Do not refactor it to call the
// indexed pipeline.
MatchingReport brute_force_match(const JobCatalog& jobs, const FileCatalog& files,
                                 const TransferCatalog& transfers, MatchTier tier) {
  MatchingReport report;
  report.tier = tier;
  report.total_jobs = jobs.records.size();

  for (const JobRecord& job : jobs.records) {
    // Candidate set: every transfer equal on all five attributes to any of
    // the job's file records.
    std::set<TransferId> candidates;
    for (const FileRecord& f : files.records) {
      if (f.pandaid != job.pandaid || f.jeditaskid != job.jeditaskid) continue;
      for (const TransferRecord& t : transfers.records) {
        if (t.lfn == f.lfn && t.dataset == f.dataset && t.proddblock == f.proddblock &&
            t.scope == f.scope && t.filesize == f.filesize) {
          candidates.insert(t.transferid);
        }
      }
    }

    std::vector<const TransferRecord*> surviving;
    std::vector<SiteInference> inferred;
    bool any_download = false;
    bool any_upload = false;
    for (TransferId id : candidates) {
      const TransferRecord& t = transfers.records[static_cast<std::size_t>(id)];
      if (!(t.starttime < job.endtime)) continue;

      bool keep = false;
      bool infer = false;
      if (t.is_download()) {
        if (t.destinationsite == job.computingsite) {
          keep = true;
        } else if (tier == MatchTier::RM2 && t.destinationsite.is_unknown()) {
          keep = true;
          infer = true;
        }
      } else if (t.is_upload()) {
        if (t.sourcesite == job.computingsite) {
          keep = true;
        } else if (tier == MatchTier::RM2 && t.sourcesite.is_unknown()) {
          keep = true;
          infer = true;
        }
      }
      if (!keep) continue;
      surviving.push_back(&t);
      any_download |= t.is_download();
      any_upload |= t.is_upload();
      if (infer) inferred.push_back({id, job.computingsite});
    }

    if (any_download && any_upload) ++report.mixed_direction_jobs;

    bool accepted = !surviving.empty();
    if (accepted && tier == MatchTier::Exact) {
      std::uint64_t total = 0;
      for (const TransferRecord* t : surviving) total += t->filesize;
      accepted = total == job.ninputfilebytes || total == job.noutputfilebytes;
    }

    if (!accepted) {
      report.unmatched_job_ids.push_back(job.pandaid);
      continue;
    }

    std::sort(surviving.begin(), surviving.end(),
              [](const TransferRecord* a, const TransferRecord* b) {
                if (a->starttime != b->starttime) return a->starttime < b->starttime;
                return a->transferid < b->transferid;
              });

    MatchSet m;
    m.pandaid = job.pandaid;
    m.tier = tier;
    bool any_local = false;
    bool any_remote = false;
    for (const TransferRecord* t : surviving) {
      m.transferids.push_back(t->transferid);
      (t->is_local() ? any_local : any_remote) = true;
    }
    m.locality = (any_local && any_remote) ? Locality::Mixed
                 : any_local               ? Locality::AllLocal
                                           : Locality::AllRemote;
    if (tier == MatchTier::RM2) {
      std::sort(inferred.begin(), inferred.end(),
                [](const SiteInference& a, const SiteInference& b) {
                  return a.transferid < b.transferid;
                });
      m.inferred_sites = std::move(inferred);
    }
    report.matches.push_back(std::move(m));
  }

  std::sort(report.matches.begin(), report.matches.end(),
            [](const MatchSet& a, const MatchSet& b) { return a.pandaid < b.pandaid; });
  std::sort(report.unmatched_job_ids.begin(), report.unmatched_job_ids.end());

  report.matched_job_count = report.matches.size();
  std::set<TransferId> distinct;
  for (const auto& m : report.matches) {
    distinct.insert(m.transferids.begin(), m.transferids.end());
  }
  report.matched_transfer_count = distinct.size();
  return report;
}

}  // namespace translink
