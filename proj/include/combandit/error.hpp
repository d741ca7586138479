#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace combandit {

enum class Errc {
    InvalidSize,
    EnumerationTooLarge,
    ArmNotInSet,
    UnsupportedKind,
    ProbabilityOverflow,
    UnknownEnvironment,
    InvalidGap,
    RejectionBudgetExhausted,
    InvalidParams,
    RewardOutOfRange,
    MisalignedRewards,
    NonUniqueOptimum,
    SupportMismatch,
    HorizonMismatch,
    HeterogeneousTraces,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidSize: return "InvalidSize";
        case Errc::EnumerationTooLarge: return "EnumerationTooLarge";
        case Errc::ArmNotInSet: return "ArmNotInSet";
        case Errc::UnsupportedKind: return "UnsupportedKind";
        case Errc::ProbabilityOverflow: return "ProbabilityOverflow";
        case Errc::UnknownEnvironment: return "UnknownEnvironment";
        case Errc::InvalidGap: return "InvalidGap";
        case Errc::RejectionBudgetExhausted: return "RejectionBudgetExhausted";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::RewardOutOfRange: return "RewardOutOfRange";
        case Errc::MisalignedRewards: return "MisalignedRewards";
        case Errc::NonUniqueOptimum: return "NonUniqueOptimum";
        case Errc::SupportMismatch: return "SupportMismatch";
        case Errc::HorizonMismatch: return "HorizonMismatch";
        case Errc::HeterogeneousTraces: return "HeterogeneousTraces";
        case Errc::ParseError: return "ParseError";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide exception. The code identifies the failure class so callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace combandit
