#pragma once

#include <cstdint>
#include <ostream>

namespace xrt::cli {

// Quick invariant suite; prints one table row per check and returns the failure count.
int diagnose(std::uint64_t seed, std::ostream& out);

}  // namespace xrt::cli
