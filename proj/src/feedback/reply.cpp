#include "rwl/feedback/reply.hpp"

#include <array>
#include <cctype>

namespace rwl::feedback {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

bool iequals_prefix(std::string_view text, std::string_view word) {
  if (text.size() < word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != word[i]) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 4> kHeadings = {"problems", "rewrite component", "remove component",
                                                        "new component"};

struct Heading {
  std::size_t which;
  std::size_t line_begin;
  std::size_t content_begin;
};

// Recognises lines such as "2. Rewrite Component: ...", "**Problems:**",
// "### 3) remove component" or "- New Components -".
std::optional<Heading> match_heading(std::string_view raw, std::size_t begin, std::size_t end) {
  const std::string_view line = raw.substr(begin, end - begin);
  std::size_t i = 0;
  auto skip = [&](std::string_view chars) {
    while (i < line.size() && chars.find(line[i]) != std::string_view::npos) ++i;
  };
  skip(" \t#*_>-`");
  if (i < line.size() && line[i] == '(') {
    std::size_t j = i + 1;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i + 1 && j < line.size() && line[j] == ')') i = j + 1;
  } else {
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) i = j + 1;
  }
  skip(" \t*_`");
  for (std::size_t h = 0; h < kHeadings.size(); ++h) {
    if (!iequals_prefix(line.substr(i), kHeadings[h])) continue;
    std::size_t k = i + kHeadings[h].size();
    if (k < line.size() && (line[k] == 's' || line[k] == 'S')) ++k;
    while (k < line.size() && std::string_view(" \t*_`").find(line[k]) != std::string_view::npos) ++k;
    if (k == line.size()) return Heading{h, begin, begin + k};
    if (line[k] == ':' || line[k] == '-') {
      ++k;
      while (k < line.size() && std::string_view(" \t*_`").find(line[k]) != std::string_view::npos) ++k;
      return Heading{h, begin, begin + k};
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

FeedbackRecord parse_vlm_feedback(std::string_view reply) {
  FeedbackRecord rec;
  rec.raw = std::string(reply);

  std::vector<Heading> headings;
  std::size_t pos = 0;
  while (pos < reply.size()) {
    std::size_t eol = reply.find('\n', pos);
    if (eol == std::string_view::npos) eol = reply.size();
    if (auto h = match_heading(reply, pos, eol)) headings.push_back(*h);
    pos = eol + 1;
  }

  std::array<std::optional<std::string>*, 4> fields = {&rec.problems, &rec.rewrite_component,
                                                       &rec.remove_component, &rec.new_component};
  for (std::size_t i = 0; i < headings.size(); ++i) {
    auto& field = *fields[headings[i].which];
    if (field) continue;
    const std::size_t stop = i + 1 < headings.size() ? headings[i + 1].line_begin : reply.size();
    const std::size_t start = std::min(headings[i].content_begin, stop);
    field = std::string(trim(reply.substr(start, stop - start)));
  }
  return rec;
}

std::string format_feedback(const FeedbackRecord& r) {
  std::string out;
  auto section = [&](int n, std::string_view title, const std::optional<std::string>& v) {
    if (!v) return;
    if (!out.empty()) out += "\n\n";
    out += std::to_string(n);
    out += ". ";
    out += title;
    out += ": ";
    out += *v;
  };
  section(1, "Problems", r.problems);
  section(2, "Rewrite Component", r.rewrite_component);
  section(3, "Remove Component", r.remove_component);
  section(4, "New Component", r.new_component);
  return out;
}

Expected<std::string, ExtractionError> extract_program_block(std::string_view reply) {
  struct Fence {
    std::string_view info;
    std::string_view body;
  };
  std::vector<Fence> fences;
  std::size_t pos = 0;
  std::optional<std::pair<std::string_view, std::size_t>> open;  // info, body start
  while (pos <= reply.size()) {
    std::size_t eol = reply.find('\n', pos);
    if (eol == std::string_view::npos) eol = reply.size();
    const std::string_view line = trim(reply.substr(pos, eol - pos));
    if (line.starts_with("```")) {
      if (open) {
        fences.push_back({open->first, reply.substr(open->second, pos - open->second)});
        open.reset();
      } else {
        open = std::make_pair(trim(line.substr(3)), std::min(eol + 1, reply.size()));
      }
    }
    if (eol == reply.size()) break;
    pos = eol + 1;
  }
  if (open) fences.push_back({open->first, reply.substr(open->second)});

  for (const auto& f : fences) {
    if (f.info == "reward") return std::string(trim(f.body));
  }
  for (const auto& f : fences) {
    if (f.info.empty()) return std::string(trim(f.body));
  }
  return unexpected(ExtractionError{"no ```reward fenced block found in the reply"});
}

std::vector<std::size_t> sample_frame_indices(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> out;
  if (n == 0 || cap == 0) return out;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  if (cap == 1) return {0};
  for (std::size_t i = 0; i < cap; ++i) out.push_back(i * (n - 1) / (cap - 1));
  return out;
}

}  // namespace rwl::feedback
