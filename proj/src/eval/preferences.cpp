#include "rwl/eval/preferences.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"

namespace rwl::eval {

PreferenceRecord::PreferenceRecord(std::string run_id, int iteration, std::string rater, int score,
                                   std::string timestamp)
    : run_id_(std::move(run_id)),
      iteration_(iteration),
      rater_(std::move(rater)),
      score_(score),
      timestamp_(std::move(timestamp)) {
  if (score_ < kMinPreference || score_ > kMaxPreference) {
    throw PreferenceError(fmt::format("preference score {} is outside [{}, {}]", score_, kMinPreference,
                                      kMaxPreference));
  }
  if (run_id_.empty()) throw PreferenceError("preference record needs a run id");
  if (iteration_ < 0) throw PreferenceError("preference iteration must be non-negative");
}

std::string PreferenceRecord::to_json_line() const {
  nlohmann::json j = {{"run", run_id_},
                      {"iteration", iteration_},
                      {"rater", rater_},
                      {"score", score_},
                      {"timestamp", timestamp_}};
  return j.dump();
}

PreferenceRecord PreferenceRecord::from_json_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    return PreferenceRecord(j.at("run").get<std::string>(), j.at("iteration").get<int>(),
                            j.value("rater", ""), j.at("score").get<int>(), j.value("timestamp", ""));
  } catch (const nlohmann::json::exception& e) {
    throw PreferenceError(fmt::format("malformed preference record: {}", e.what()));
  }
}

std::map<std::string, double> aggregate_preferences(std::span<const PreferenceRecord> records) {
  if (records.empty()) throw PreferenceError("no preference records to aggregate");
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& r : records) {
    auto& [sum, n] = acc[r.run_id()];
    sum += r.score();
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [run, sn] : acc) out[run] = sn.first / sn.second;
  return out;
}

void append_preference(const std::filesystem::path& file, const PreferenceRecord& record) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::app | std::ios::binary);
  if (!out) throw IoError(fmt::format("{}: cannot open for append", file.string()));
  out << record.to_json_line() << '\n';
  if (!out) throw IoError(fmt::format("{}: write failed", file.string()));
}

std::vector<PreferenceRecord> load_preferences(const std::filesystem::path& file) {
  std::vector<PreferenceRecord> out;
  if (!std::filesystem::exists(file)) return out;
  std::ifstream in(file, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(PreferenceRecord::from_json_line(line));
  }
  return out;
}

}  // namespace rwl::eval
