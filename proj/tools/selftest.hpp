#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hrl::tool {

enum class CheckKind { near, at_most, at_least };

struct CheckRow {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::near;
  bool pass = false;
};

// Runs the built-in example checks; n and J drive the generic field checks.
std::vector<CheckRow> run_selftest(int n, int J, std::uint64_t seed);

}  // namespace hrl::tool
