#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rwl/common/expected.hpp"

namespace rwl::feedback {

/// Upper-level feedback. Structured fields are trimmed slices of `raw`.
struct FeedbackRecord {
  std::string raw;
  std::optional<std::string> problems;
  std::optional<std::string> rewrite_component;
  std::optional<std::string> remove_component;
  std::optional<std::string> new_component;

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

/// Splits on the "Problems", "Rewrite Component", "Remove Component" and
/// "New Component" headings (any case, optional numbering and markdown).
FeedbackRecord parse_vlm_feedback(std::string_view reply);

/// Canonical numbered text for a record assembled from separate fields.
std::string format_feedback(const FeedbackRecord& record);

struct ExtractionError {
  std::string message;
};

/// Contents of the first ```reward fence, else the first untagged fence,
/// trimmed.
Expected<std::string, ExtractionError> extract_program_block(std::string_view reply);

/// floor(i * (n - 1) / (k - 1)) for i in [0, k); every index when n <= k.
std::vector<std::size_t> sample_frame_indices(std::size_t n, std::size_t cap);

inline constexpr std::size_t kDefaultFrameCap = 16;

}  // namespace rwl::feedback
