#pragma once

#include <cstdint>
#include <string>

namespace distress {

// Deterministic synthetic two-year statement corpus in the input CSV
// schema. Statement lines are drawn from log-normal/normal generators
// with profit signs and obligation flags conditioned on the requested
// distress status, so replaying the labeling rules reproduces the
// requested distressed count. Byte-identical output per seed.
std::string generate_synthetic(std::uint64_t seed, int n, double distress_fraction);

}  // namespace distress
