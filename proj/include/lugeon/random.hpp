#pragma once

#include <cstdint>
#include <string_view>

namespace lugeon {

// Named sub-streams of one master seed, so each component can be re-seeded
// independently (split, som, growth, synth, ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) noexcept;

}  // namespace lugeon
