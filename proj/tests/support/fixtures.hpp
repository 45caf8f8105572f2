#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "rwl/feedback/prompts.hpp"
#include "rwl/orch/config.hpp"

namespace rwl::testing {

std::filesystem::path test_data(const std::string& relative = "");
std::filesystem::path repo_data(const std::string& relative = "");

/// Config from tests/data/configs/<name>.json.
orch::RunConfig test_config(const std::string& name);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

/// Relative path -> file bytes for every regular file below `dir`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir);

/// tests/data/frozen.json
nlohmann::json frozen_values();

/// Context the committed prompt goldens were rendered with.
feedback::PromptContext golden_prompt_context();

/// tests/data/golden/<kind>.txt
std::filesystem::path golden_path(feedback::PromptKind kind);

}  // namespace rwl::testing
