#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rwl {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid configuration values (bad ranges, missing fields).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rwl
