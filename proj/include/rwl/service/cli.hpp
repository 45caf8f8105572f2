#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rwl::service {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAborted = 2;

/// Entry point for `rewardlab <command> [flags]`. `args` excludes argv[0].
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwl::service
