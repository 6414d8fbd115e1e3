#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netpot {

/// Every failure raised by the library carries one of these codes so callers
/// (and tests) can branch on the kind without parsing messages.
enum class Errc {
    InvalidArgument,
    NonPositiveConductance,
    Disconnected,
    SelfLoop,
    RootAbsent,
    UnknownVertex,
    InvalidSpec,
    InvalidFormat,
    VertexNotInterior,
    VertexOutsideBall,
    ExhaustedBall,
    SingularSystem,
    ResidualTooLarge,
    TargetIsRoot,
    MeasureNotNormalized,
    NotMonotone,
    PathTouchesRoot,
    PathTouchesTarget,
    InvalidPath,
    Unbounded,
    Infeasible,
    IdentityViolation,
    BallMismatch,
    ScheduleInfeasible,
    EmptyStateSpace,
    NotInStateSpace,
    BallTooSmall,
    PathSpaceTooLarge,
    EllTooLarge,
    Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace netpot
