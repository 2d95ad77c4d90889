// cli.hpp: the `rdcont` command line: test, simulate, curve.
//
// Exit codes: 0 success (whatever the test decides), 2 usage error,
// 3 data error. RDCONT_SEED supplies the seed when --seed is absent.
#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace rdcont {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rdcont
