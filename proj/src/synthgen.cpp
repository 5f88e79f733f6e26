#include "translink/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace translink {

namespace {

// Deterministic sampling helpers on top of mt19937_64. The standard
// distributions are implementation-defined, so sampling is done by hand to
// keep (seed -> output) stable across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Inclusive range, rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return lo + x % span;
  }

  std::int64_t uniform_i64(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_u64(0, static_cast<std::uint64_t>(hi - lo)));
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t log_uniform(std::uint64_t lo, std::uint64_t hi) {
    const double x = uniform(std::log(static_cast<double>(lo)),
                             std::log(static_cast<double>(hi)));
    const double v = std::exp(x);
    const auto r = static_cast<std::uint64_t>(v);
    return std::clamp(r, lo, hi);
  }

  std::size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform(0.0, total);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (x < weights[i] || i + 1 == weights.size()) return i;
      x -= weights[i];
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

constexpr PandaId kPandaIdBase = 6'580'000'000;
constexpr TaskId kTaskIdBase = 44'210'000;
constexpr TaskId kOrphanTaskIdBase = 49'000'000;
constexpr std::int64_t kMaxQueuingSeconds = 3600;
constexpr std::int64_t kMaxWallSeconds = 7200;

std::string two_digits(int n) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d", n);
  return buf;
}

struct PendingTransfer {
  TransferRecord record;
  std::int64_t gen_seq = 0;
  PandaId linked_job = 0;  // 0 for orphans
};

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

void SynthConfig::validate() const {
  require(window.valid(), "window must satisfy start < end");
  require(window.end - window.start >= 43200,
          "window must span at least 12 hours to fit job lifetimes");
  require(site_count >= 1, "site_count must be at least 1");
  require(!site_tiers.empty(), "site_tiers must be non-empty");
  require(job_count >= 0, "job_count must be non-negative");
  require(files_per_job_min >= 1, "files_per_job_min must be at least 1");
  require(files_per_job_max >= files_per_job_min,
          "files_per_job_max must be >= files_per_job_min");
  require(file_size_min >= 1, "file_size_min must be at least 1");
  require(file_size_max >= file_size_min, "file_size_max must be >= file_size_min");
  require(size_perturb_max_delta >= 1, "size_perturb_max_delta must be at least 1");
  require(orphan_activity_weights.size() == all_activities().size(),
          "orphan_activity_weights needs one weight per activity");
  double wsum = 0.0;
  for (double w : orphan_activity_weights) {
    require(w >= 0.0, "orphan activity weights must be non-negative");
    wsum += w;
  }
  require(wsum > 0.0, "orphan activity weights must not all be zero");
  check_prob(local_transfer_prob, "local_transfer_prob");
  check_prob(upload_job_prob, "upload_job_prob");
  check_prob(directio_job_prob, "directio_job_prob");
  check_prob(orphan_taskid_prob, "orphan_taskid_prob");
  check_prob(size_perturb_rate, "size_perturb_rate");
  check_prob(size_total_rate, "size_total_rate");
  check_prob(unknown_site_rate, "unknown_site_rate");
  check_prob(drop_taskid_rate, "drop_taskid_rate");
  check_prob(job_success_prob, "job_success_prob");
  check_prob(task_success_prob, "task_success_prob");
  require(size_perturb_rate + size_total_rate + unknown_site_rate <= 1.0,
          "job-level corruption rates must sum to at most 1");
  require(orphan_rate >= 0.0, "orphan_rate must be non-negative");
}

Scenario generate_scenario(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<SiteName> sites;
  sites.reserve(static_cast<std::size_t>(config.site_count));
  for (int i = 0; i < config.site_count; ++i) {
    const std::string& tier = config.site_tiers[static_cast<std::size_t>(i) %
                                                config.site_tiers.size()];
    sites.push_back(normalize_site("SITE-" + two_digits(i + 1) + "-" + tier));
  }
  auto other_site = [&](const SiteName& not_this) {
    if (sites.size() == 1) return sites.front();
    while (true) {
      const SiteName& s = sites[rng.uniform_u64(0, sites.size() - 1)];
      if (!(s == not_this)) return s;
    }
  };

  Scenario scenario;
  scenario.jobs.window = config.window;
  scenario.transfers.window = config.window;
  scenario.truth.seed = config.seed;
  scenario.truth.window = config.window;

  std::vector<PendingTransfer> pending;
  std::int64_t gen_seq = 0;

  TaskId taskid = kTaskIdBase;
  std::int64_t jobs_left_in_task = 0;

  for (std::int64_t ji = 0; ji < config.job_count; ++ji) {
    if (jobs_left_in_task == 0) {
      ++taskid;
      jobs_left_in_task = rng.uniform_i64(1, 6);
    }
    --jobs_left_in_task;

    JobRecord job;
    job.pandaid = kPandaIdBase + ji;
    job.jeditaskid = taskid;

    const std::int64_t queuing = rng.uniform_i64(60, kMaxQueuingSeconds);
    const std::int64_t wall = rng.uniform_i64(120, kMaxWallSeconds);
    const std::int64_t latest_creation = config.window.end.value - queuing - wall;
    job.creationtime = Timestamp{rng.uniform_i64(config.window.start.value, latest_creation)};
    job.starttime = job.creationtime + queuing;
    job.endtime = job.starttime + wall;
    job.computingsite = sites[rng.uniform_u64(0, sites.size() - 1)];
    job.jobstatus = rng.bernoulli(config.job_success_prob) ? JobStatus::Finished
                                                           : JobStatus::Failed;
    job.taskstatus = rng.bernoulli(config.task_success_prob) ? TaskStatus::Done
                                                             : TaskStatus::Failed;

    const bool upload_job = rng.bernoulli(config.upload_job_prob);
    const bool directio_job = !upload_job && rng.bernoulli(config.directio_job_prob);
    const bool local_job = rng.bernoulli(config.local_transfer_prob);

    const int nfiles =
        static_cast<int>(rng.uniform_i64(config.files_per_job_min, config.files_per_job_max));
    std::uint64_t byte_sum = 0;

    for (int fi = 0; fi < nfiles; ++fi) {
      FileRecord file;
      file.pandaid = job.pandaid;
      file.jeditaskid = job.jeditaskid;
      char lfn[64];
      std::snprintf(lfn, sizeof(lfn), "synth.%lld.f%03d.root",
                    static_cast<long long>(job.pandaid), fi);
      file.lfn = lfn;
      file.dataset = "synth25." + std::to_string(taskid) + ".daod";
      file.proddblock = file.dataset + ".block" + std::to_string(fi % 4);
      file.scope = "user.synth";
      file.filesize = rng.log_uniform(config.file_size_min, config.file_size_max);
      byte_sum += file.filesize;

      PendingTransfer pt;
      pt.gen_seq = gen_seq++;
      pt.linked_job = job.pandaid;
      TransferRecord& t = pt.record;
      t.lfn = file.lfn;
      t.dataset = file.dataset;
      t.proddblock = file.proddblock;
      t.scope = file.scope;
      t.filesize = file.filesize;
      t.jeditaskid = job.jeditaskid;

      if (upload_job) {
        t.activity = TransferActivity::AnalysisUpload;
        t.starttime = Timestamp{rng.uniform_i64(job.starttime.value, job.endtime.value - 1)};
        t.endtime = t.starttime + rng.uniform_i64(10, 600);
        t.sourcesite = job.computingsite;
        t.destinationsite = local_job ? job.computingsite : other_site(job.computingsite);
      } else if (directio_job) {
        t.activity = TransferActivity::AnalysisDownloadDirectIO;
        t.starttime = Timestamp{rng.uniform_i64(job.starttime.value, job.endtime.value - 1)};
        t.endtime = t.starttime + rng.uniform_i64(10, 600);
        t.destinationsite = job.computingsite;
        t.sourcesite = local_job ? job.computingsite : other_site(job.computingsite);
      } else {
        // Staged download during queuing. Starts cluster inside the first ten
        // seconds and every span reaches past that cluster, so the intervals
        // of one job always overlap pairwise (parallel staging).
        t.activity = TransferActivity::AnalysisDownload;
        t.starttime = job.creationtime + rng.uniform_i64(0, std::min<std::int64_t>(10, queuing / 4));
        const std::int64_t max_duration = std::max<std::int64_t>(15, queuing - 12);
        t.endtime = t.starttime + rng.uniform_i64(15, max_duration);
        if (t.endtime > job.starttime) t.endtime = job.starttime;
        t.destinationsite = job.computingsite;
        t.sourcesite = local_job ? job.computingsite : other_site(job.computingsite);
      }

      scenario.files.records.push_back(std::move(file));
      pending.push_back(std::move(pt));
    }

    if (upload_job) {
      job.noutputfilebytes = byte_sum;
      job.ninputfilebytes = byte_sum + 1 + rng.uniform_u64(0, 999'983);
    } else {
      job.ninputfilebytes = byte_sum;
      job.noutputfilebytes = byte_sum + 1 + rng.uniform_u64(0, 999'983);
    }
    scenario.jobs.records.push_back(std::move(job));
  }

  // Unlinked background transfers.
  const auto orphan_count =
      static_cast<std::int64_t>(std::llround(config.orphan_rate * static_cast<double>(pending.size())));
  for (std::int64_t oi = 0; oi < orphan_count; ++oi) {
    PendingTransfer pt;
    pt.gen_seq = gen_seq++;
    TransferRecord& t = pt.record;
    t.lfn = "orphan." + std::to_string(oi) + ".root";
    t.dataset = "synth25.orphan." + std::to_string(oi / 50) + ".daod";
    t.proddblock = t.dataset + ".block0";
    t.scope = "user.synth";
    t.filesize = rng.log_uniform(config.file_size_min, config.file_size_max);
    t.starttime = Timestamp{rng.uniform_i64(config.window.start.value, config.window.end.value)};
    t.endtime = t.starttime + rng.uniform_i64(5, 3600);
    t.sourcesite = sites[rng.uniform_u64(0, sites.size() - 1)];
    t.destinationsite = rng.bernoulli(config.local_transfer_prob)
                            ? t.sourcesite
                            : sites[rng.uniform_u64(0, sites.size() - 1)];
    t.activity = all_activities()[rng.weighted_index(config.orphan_activity_weights)];
    if (rng.bernoulli(config.orphan_taskid_prob)) {
      t.jeditaskid = kOrphanTaskIdBase + oi;
    }
    pending.push_back(std::move(pt));
  }

  // Export order is by start time; transfer ids are positions in that order,
  // matching what ingest assigns on reload.
  std::sort(pending.begin(), pending.end(), [](const PendingTransfer& a, const PendingTransfer& b) {
    if (a.record.starttime != b.record.starttime) return a.record.starttime < b.record.starttime;
    return a.gen_seq < b.gen_seq;
  });
  scenario.transfers.records.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    pending[i].record.transferid = static_cast<TransferId>(i);
    if (pending[i].linked_job != 0) {
      scenario.truth.links[pending[i].linked_job].push_back(static_cast<TransferId>(i));
    }
    scenario.transfers.records.push_back(std::move(pending[i].record));
  }
  for (auto& [pandaid, ids] : scenario.truth.links) {
    std::sort(ids.begin(), ids.end());
  }

  scenario.jobs.total_lines = scenario.jobs.records.size();
  scenario.files.total_lines = scenario.files.records.size();
  scenario.transfers.total_lines = scenario.transfers.records.size();
  scenario.truth.job_count = scenario.jobs.records.size();
  scenario.truth.file_count = scenario.files.records.size();
  scenario.truth.transfer_count = scenario.transfers.records.size();
  return scenario;
}

void inject_corruptions(Scenario& scenario, const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed ^ 0x5bf0'3635'dea8'91e3ULL);

  auto& transfers = scenario.transfers.records;
  std::vector<LinkAnnotation> annotations;

  auto job_by_id = [&](PandaId id) -> JobRecord& {
    auto it = std::lower_bound(scenario.jobs.records.begin(), scenario.jobs.records.end(), id,
                               [](const JobRecord& j, PandaId v) { return j.pandaid < v; });
    return *it;
  };

  for (auto& [pandaid, ids] : scenario.truth.links) {
    const double u = rng.uniform01();
    if (u < config.unknown_site_rate) {
      // Erase the direction-tested endpoint on every linked transfer: the
      // exact and RM1 tiers lose the whole job, RM2 recovers it with an
      // inferred site.
      for (TransferId id : ids) {
        TransferRecord& t = transfers[static_cast<std::size_t>(id)];
        LinkAnnotation a;
        a.pandaid = pandaid;
        a.transferid = id;
        a.kind = "unknown_site";
        a.broken_exact = true;
        a.broken_rm1 = true;
        if (t.is_download()) {
          a.original_site = t.destinationsite;
          t.destinationsite = SiteName::unknown();
        } else {
          a.original_site = t.sourcesite;
          t.sourcesite = SiteName::unknown();
        }
        annotations.push_back(std::move(a));
      }
    } else if (u < config.unknown_site_rate + config.size_total_rate) {
      // Make the job's byte totals inconsistent with its file sum: only the
      // whole-set size test is affected, so RM1 recovers everything.
      JobRecord& job = job_by_id(pandaid);
      const std::uint64_t delta = 1 + rng.uniform_u64(0, config.size_perturb_max_delta - 1);
      job.ninputfilebytes += delta;
      job.noutputfilebytes += delta;
      for (TransferId id : ids) {
        LinkAnnotation a;
        a.pandaid = pandaid;
        a.transferid = id;
        a.kind = "size_total";
        a.broken_exact = true;
        annotations.push_back(std::move(a));
      }
    } else if (u < config.unknown_site_rate + config.size_total_rate + config.size_perturb_rate) {
      // Perturb one transfer's file-size attribute: that link loses its
      // candidate key at every tier, and the siblings' byte sum no longer
      // matches at Exact.
      const TransferId victim = ids[rng.uniform_u64(0, ids.size() - 1)];
      TransferRecord& t = transfers[static_cast<std::size_t>(victim)];
      const std::uint64_t delta = 1 + rng.uniform_u64(0, config.size_perturb_max_delta - 1);
      if (rng.bernoulli(0.5) && t.filesize > delta) {
        t.filesize -= delta;
      } else {
        t.filesize += delta;
      }
      for (TransferId id : ids) {
        LinkAnnotation a;
        a.pandaid = pandaid;
        a.transferid = id;
        if (id == victim) {
          a.kind = "size_perturb";
          a.broken_exact = true;
          a.broken_rm1 = true;
          a.broken_rm2 = true;
        } else {
          a.kind = "size_perturb_collateral";
          a.broken_exact = true;
        }
        annotations.push_back(std::move(a));
      }
    }
  }

  if (config.drop_taskid_rate > 0.0) {
    std::set<std::pair<PandaId, TransferId>> annotated;
    for (const auto& a : annotations) annotated.insert({a.pandaid, a.transferid});
    std::map<TransferId, PandaId> linked_job_of;
    for (const auto& [pandaid, ids] : scenario.truth.links) {
      for (TransferId id : ids) linked_job_of[id] = pandaid;
    }
    for (TransferRecord& t : transfers) {
      if (!t.jeditaskid.has_value()) continue;
      if (!rng.bernoulli(config.drop_taskid_rate)) continue;
      auto it = linked_job_of.find(t.transferid);
      if (it != linked_job_of.end()) {
        // One corruption per link so annotations stay exact.
        if (annotated.count({it->second, t.transferid})) continue;
        LinkAnnotation a;
        a.pandaid = it->second;
        a.transferid = t.transferid;
        a.kind = "drop_taskid";  // matching is unaffected; summaries change
        annotations.push_back(std::move(a));
      }
      t.jeditaskid.reset();
    }
  }

  std::sort(annotations.begin(), annotations.end(),
            [](const LinkAnnotation& a, const LinkAnnotation& b) {
              if (a.pandaid != b.pandaid) return a.pandaid < b.pandaid;
              return a.transferid < b.transferid;
            });
  scenario.truth.annotations = std::move(annotations);
}

MatchScore score_matching(const MatchingReport& report, const GroundTruth& truth) {
  if (truth.links.empty()) {
    throw DataError("empty ground truth");
  }
  if (report.total_jobs != truth.job_count) {
    throw DataError("report/truth scenario mismatch: job universe differs");
  }

  std::set<std::pair<PandaId, TransferId>> truth_links;
  for (const auto& [pandaid, ids] : truth.links) {
    for (TransferId id : ids) truth_links.insert({pandaid, id});
  }

  MatchScore score;
  score.tier = report.tier;
  score.truth_links = truth_links.size();

  std::set<std::pair<PandaId, TransferId>> reported;
  for (const MatchSet& m : report.matches) {
    for (TransferId id : m.transferids) {
      if (id < 0 || static_cast<std::uint64_t>(id) >= truth.transfer_count) {
        throw DataError("report/truth scenario mismatch: transfer id out of range");
      }
      reported.insert({m.pandaid, id});
    }
  }
  score.reported_links = reported.size();
  for (const auto& link : reported) {
    if (truth_links.count(link)) ++score.true_links_found;
  }
  score.precision = reported.empty() ? 1.0
                                     : static_cast<double>(score.true_links_found) /
                                           static_cast<double>(reported.size());
  score.recall = static_cast<double>(score.true_links_found) /
                 static_cast<double>(score.truth_links);

  // Recovery per corruption kind, plus inferred-site correctness where the
  // original endpoint is known.
  std::map<PandaId, const MatchSet*> match_of;
  for (const MatchSet& m : report.matches) match_of[m.pandaid] = &m;

  std::map<std::string, ScoreRow> rows;
  for (const LinkAnnotation& a : truth.annotations) {
    ScoreRow& row = rows[a.kind];
    row.kind = a.kind;
    ++row.links;
    if (reported.count({a.pandaid, a.transferid})) ++row.recovered;
    if (a.original_site.has_value()) {
      auto it = match_of.find(a.pandaid);
      if (it != match_of.end()) {
        for (const SiteInference& inf : it->second->inferred_sites) {
          if (inf.transferid == a.transferid && inf.site == *a.original_site) {
            ++row.inferred_correct;
            break;
          }
        }
      }
    }
  }
  for (auto& [kind, row] : rows) score.per_corruption.push_back(std::move(row));
  return score;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw ConfigError("cannot open config file: " + path.string());
  }

  SynthConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty()) {
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      }
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }

    auto as_u64 = [&](const std::string& v) -> std::uint64_t {
      try {
        return std::stoull(v);
      } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(lineno) + ": bad integer: " + v);
      }
    };
    auto as_i64 = [&](const std::string& v) -> std::int64_t {
      try {
        return std::stoll(v);
      } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(lineno) + ": bad integer: " + v);
      }
    };
    auto as_double = [&](const std::string& v) -> double {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(lineno) + ": bad number: " + v);
      }
    };
    auto as_list = [&](const std::string& v) {
      std::vector<std::string> items;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
      }
      return items;
    };

    if (key == "seed") config.seed = as_u64(value);
    else if (key == "window_start") config.window.start = Timestamp{as_i64(value)};
    else if (key == "window_end") config.window.end = Timestamp{as_i64(value)};
    else if (key == "site_count") config.site_count = static_cast<int>(as_i64(value));
    else if (key == "site_tiers") config.site_tiers = as_list(value);
    else if (key == "job_count") config.job_count = as_i64(value);
    else if (key == "files_per_job_min") config.files_per_job_min = static_cast<int>(as_i64(value));
    else if (key == "files_per_job_max") config.files_per_job_max = static_cast<int>(as_i64(value));
    else if (key == "file_size_min") config.file_size_min = as_u64(value);
    else if (key == "file_size_max") config.file_size_max = as_u64(value);
    else if (key == "local_transfer_prob") config.local_transfer_prob = as_double(value);
    else if (key == "upload_job_prob") config.upload_job_prob = as_double(value);
    else if (key == "directio_job_prob") config.directio_job_prob = as_double(value);
    else if (key == "orphan_rate") config.orphan_rate = as_double(value);
    else if (key == "orphan_taskid_prob") config.orphan_taskid_prob = as_double(value);
    else if (key == "orphan_activity_weights") {
      config.orphan_activity_weights.clear();
      for (const std::string& item : as_list(value)) {
        config.orphan_activity_weights.push_back(as_double(item));
      }
    }
    else if (key == "size_perturb_rate") config.size_perturb_rate = as_double(value);
    else if (key == "size_total_rate") config.size_total_rate = as_double(value);
    else if (key == "unknown_site_rate") config.unknown_site_rate = as_double(value);
    else if (key == "drop_taskid_rate") config.drop_taskid_rate = as_double(value);
    else if (key == "size_perturb_max_delta") config.size_perturb_max_delta = as_u64(value);
    else if (key == "job_success_prob") config.job_success_prob = as_double(value);
    else if (key == "task_success_prob") config.task_success_prob = as_double(value);
    else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key: " + key);
    }
  }
  config.validate();
  return config;
}

}  // namespace translink
