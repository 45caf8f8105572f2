#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rwl/lang/program.hpp"

namespace rwl::testing {

/// Result of the reference tree-walking interpreter.
struct NaiveResult {
  bool ok = false;
  double total = 0.0;
  std::vector<double> components;
  std::string error;  // full message when !ok
};

/// Direct recursive evaluation over a name->value map. Shares nothing
/// with the compiled evaluator.
NaiveResult naive_evaluate(const lang::RewardProgram& program, const std::map<std::string, double>& channels);

/// Random well-formed programs over a fixed channel set.
class ProgramGenerator {
 public:
  ProgramGenerator(std::uint64_t seed, std::vector<std::string> channels, int max_depth = 4);

  lang::RewardProgram next();
  std::map<std::string, double> random_context();

  const std::vector<std::string>& channels() const { return channels_; }

 private:
  lang::Expr expr(int depth, const std::vector<std::string>& scope);
  double number();

  std::mt19937_64 rng_;
  std::vector<std::string> channels_;
  int max_depth_;
};

/// Eight channel names from the hopper schema.
std::vector<std::string> default_test_channels();

}  // namespace rwl::testing
