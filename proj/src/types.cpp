#include "wakeradar/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace wakeradar {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view to_string(WakeStage stage) {
    switch (stage) {
        case WakeStage::Young: return "Young";
        case WakeStage::Mature: return "Mature";
        case WakeStage::Old: return "Old";
        case WakeStage::Decaying: return "Decaying";
    }
    return "?";
}

std::string_view to_string(SlopeSign sign) {
    switch (sign) {
        case SlopeSign::Positive: return "positive";
        case SlopeSign::Mixed: return "mixed";
        case SlopeSign::Negative: return "negative";
    }
    return "?";
}

std::optional<WakeStage> parse_wake_stage(std::string_view text) {
    const std::string t = lower(text);
    if (t == "young") return WakeStage::Young;
    if (t == "mature") return WakeStage::Mature;
    if (t == "old") return WakeStage::Old;
    if (t == "decaying") return WakeStage::Decaying;
    return std::nullopt;
}

std::optional<SlopeSign> parse_slope_sign(std::string_view text) {
    const std::string t = lower(text);
    if (t == "positive") return SlopeSign::Positive;
    if (t == "mixed") return SlopeSign::Mixed;
    if (t == "negative") return SlopeSign::Negative;
    return std::nullopt;
}

SlopeSign default_slope_for(WakeStage stage) {
    switch (stage) {
        case WakeStage::Young: return SlopeSign::Positive;
        case WakeStage::Mature: return SlopeSign::Mixed;
        case WakeStage::Old:
        case WakeStage::Decaying: return SlopeSign::Negative;
    }
    return SlopeSign::Mixed;
}

}  // namespace wakeradar
