#include "rbt/self_adjust.hpp"

namespace rbt {

std::string_view to_string(SelfAdjustMode mode) noexcept {
    switch (mode) {
        case SelfAdjustMode::None: return "none";
        case SelfAdjustMode::Rerandomize: return "rerandomize";
        case SelfAdjustMode::Counter: return "counter";
    }
    return "?";
}

std::optional<SelfAdjustMode> parse_self_adjust_mode(std::string_view text) noexcept {
    if (text == "none") return SelfAdjustMode::None;
    if (text == "rerandomize") return SelfAdjustMode::Rerandomize;
    if (text == "counter") return SelfAdjustMode::Counter;
    return std::nullopt;
}

}  // namespace rbt
