#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "rbt/element.hpp"

namespace rbt {

enum class SelfAdjustMode : std::uint8_t { None, Rerandomize, Counter };

std::string_view to_string(SelfAdjustMode mode) noexcept;
std::optional<SelfAdjustMode> parse_self_adjust_mode(std::string_view text) noexcept;

// Rerandomize heuristic: an access draws a fresh r and keeps the larger of r
// and the current priority. After k accesses the priority is the maximum of
// k+1 uniform draws.
[[nodiscard]] constexpr Priority rerandomized_priority(Priority current, Priority draw) noexcept {
    return draw > current ? draw : current;
}

// Counter heuristic: each access increments, saturating at the reset bound.
[[nodiscard]] constexpr Priority incremented_counter(Priority current, Priority reset_bound) noexcept {
    return current >= reset_bound ? reset_bound : current + 1;
}

[[nodiscard]] constexpr Priority counter_reset_bound(unsigned counter_bits) noexcept {
    return counter_bits >= 64 ? ~Priority{0} : (Priority{1} << counter_bits) - 1;
}

// One global reset halves every counter; `epochs` pending resets shift by
// that many bits. Counters never drop below 1.
[[nodiscard]] constexpr Priority aged_counter(Priority counter, std::uint32_t epochs) noexcept {
    if (epochs == 0) return counter;
    const Priority shifted = epochs >= 64 ? 0 : counter >> epochs;
    return shifted < 1 ? 1 : shifted;
}

}  // namespace rbt
