#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rwl::eval {

class PreferenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A 0-5 rating of one iteration's behaviour by one rater.
class PreferenceRecord {
 public:
  /// Throws PreferenceError when the score is outside [0, 5] or the run id
  /// is empty.
  PreferenceRecord(std::string run_id, int iteration, std::string rater, int score, std::string timestamp);

  const std::string& run_id() const { return run_id_; }
  int iteration() const { return iteration_; }
  const std::string& rater() const { return rater_; }
  int score() const { return score_; }
  const std::string& timestamp() const { return timestamp_; }

  std::string to_json_line() const;
  static PreferenceRecord from_json_line(std::string_view line);

  friend bool operator==(const PreferenceRecord&, const PreferenceRecord&) = default;

 private:
  std::string run_id_;
  int iteration_;
  std::string rater_;
  int score_;
  std::string timestamp_;
};

inline constexpr int kMinPreference = 0;
inline constexpr int kMaxPreference = 5;

/// Mean score per run id. Throws PreferenceError on empty input.
std::map<std::string, double> aggregate_preferences(std::span<const PreferenceRecord> records);

void append_preference(const std::filesystem::path& file, const PreferenceRecord& record);
/// Missing file reads as no records.
std::vector<PreferenceRecord> load_preferences(const std::filesystem::path& file);

}  // namespace rwl::eval
