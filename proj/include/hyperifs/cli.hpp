#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// it can be driven in-process by tests.
//
// Exit codes: 0 condition holds on the sample, 1 condition failed,
// 2 configuration or usage error.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hyperifs/zoo.hpp"

namespace hyperifs::cli {

inline constexpr int kExitHolds = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that, when set, replaces the output directory.
inline constexpr const char* kOutDirEnv = "HYPERIFS_OUT_DIR";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// File name -> content of an example bundle, plus the overall verdict.
struct Bundle {
  std::map<std::string, std::string> files;
  bool passed = false;
};

struct ExampleOptions {
  std::uint64_t seed = 0;
  std::size_t pairs = 0;  // 0 picks the example default (100, 100, 50)
  CircleExampleConfig circle;
  TorusExampleConfig torus;
  SphereExampleConfig sphere;
};

/// Runs the full property battery of "circle", "torus" or "sphere".
Bundle run_example(const std::string& name, const ExampleOptions& options);

}  // namespace hyperifs::cli
