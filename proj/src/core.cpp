#include "translink/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace translink {

std::int64_t interval_overlap(const Interval& a, const Interval& b) {
  const std::int64_t lo = std::max(a.start.value, b.start.value);
  const std::int64_t hi = std::min(a.end.value, b.end.value);
  return std::max<std::int64_t>(0, hi - lo);
}

SiteName normalize_site(std::string_view raw,
                        const std::unordered_set<std::string>& invalid_tokens) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;

  std::string token;
  token.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    token.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(raw[i]))));
  }

  if (token.empty() || token == SiteName::kUnknownToken || invalid_tokens.count(token) > 0) {
    return SiteName::unknown();
  }
  return SiteName{std::move(token)};
}

namespace {

constexpr std::array<std::pair<TransferActivity, std::string_view>, 6> kActivityNames{{
    {TransferActivity::AnalysisDownload, "Analysis Download"},
    {TransferActivity::AnalysisUpload, "Analysis Upload"},
    {TransferActivity::AnalysisDownloadDirectIO, "Analysis Download Direct IO"},
    {TransferActivity::ProductionUpload, "Production Upload"},
    {TransferActivity::ProductionDownload, "Production Download"},
    {TransferActivity::Other, "Other"},
}};

}  // namespace

std::string_view activity_name(TransferActivity a) {
  for (const auto& [act, name] : kActivityNames) {
    if (act == a) return name;
  }
  return "Other";
}

std::optional<TransferActivity> parse_activity(std::string_view name) {
  for (const auto& [act, n] : kActivityNames) {
    if (n == name) return act;
  }
  return std::nullopt;
}

std::vector<TransferActivity> all_activities() {
  std::vector<TransferActivity> out;
  out.reserve(kActivityNames.size());
  for (const auto& [act, name] : kActivityNames) out.push_back(act);
  return out;
}

std::string_view job_status_name(JobStatus s) {
  return s == JobStatus::Finished ? "finished" : "failed";
}

std::string_view task_status_name(TaskStatus s) {
  return s == TaskStatus::Done ? "done" : "failed";
}

std::optional<JobStatus> parse_job_status(std::string_view name) {
  if (name == "finished") return JobStatus::Finished;
  if (name == "failed") return JobStatus::Failed;
  return std::nullopt;
}

std::optional<TaskStatus> parse_task_status(std::string_view name) {
  if (name == "done") return TaskStatus::Done;
  if (name == "failed") return TaskStatus::Failed;
  return std::nullopt;
}

std::string_view tier_name(MatchTier t) {
  switch (t) {
    case MatchTier::Exact: return "exact";
    case MatchTier::RM1: return "rm1";
    case MatchTier::RM2: return "rm2";
  }
  return "exact";
}

std::optional<MatchTier> parse_tier(std::string_view name) {
  if (name == "exact") return MatchTier::Exact;
  if (name == "rm1") return MatchTier::RM1;
  if (name == "rm2") return MatchTier::RM2;
  return std::nullopt;
}

std::string_view locality_name(Locality l) {
  switch (l) {
    case Locality::AllLocal: return "all_local";
    case Locality::AllRemote: return "all_remote";
    case Locality::Mixed: return "mixed";
  }
  return "mixed";
}

std::optional<Locality> parse_locality(std::string_view name) {
  if (name == "all_local") return Locality::AllLocal;
  if (name == "all_remote") return Locality::AllRemote;
  if (name == "mixed") return Locality::Mixed;
  return std::nullopt;
}

}  // namespace translink
