#include "netpot/hash.hpp"

#include <array>

#include <openssl/evp.h>

#include "netpot/errors.hpp"

namespace netpot {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::Io, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonPositiveConductance: return "NonPositiveConductance";
    case Errc::Disconnected: return "Disconnected";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::RootAbsent: return "RootAbsent";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidFormat: return "InvalidFormat";
    case Errc::VertexNotInterior: return "VertexNotInterior";
    case Errc::VertexOutsideBall: return "VertexOutsideBall";
    case Errc::ExhaustedBall: return "ExhaustedBall";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::ResidualTooLarge: return "ResidualTooLarge";
    case Errc::TargetIsRoot: return "TargetIsRoot";
    case Errc::MeasureNotNormalized: return "MeasureNotNormalized";
    case Errc::NotMonotone: return "NotMonotone";
    case Errc::PathTouchesRoot: return "PathTouchesRoot";
    case Errc::PathTouchesTarget: return "PathTouchesTarget";
    case Errc::InvalidPath: return "InvalidPath";
    case Errc::Unbounded: return "Unbounded";
    case Errc::Infeasible: return "Infeasible";
    case Errc::IdentityViolation: return "IdentityViolation";
    case Errc::BallMismatch: return "BallMismatch";
    case Errc::ScheduleInfeasible: return "ScheduleInfeasible";
    case Errc::EmptyStateSpace: return "EmptyStateSpace";
    case Errc::NotInStateSpace: return "NotInStateSpace";
    case Errc::BallTooSmall: return "BallTooSmall";
    case Errc::PathSpaceTooLarge: return "PathSpaceTooLarge";
    case Errc::EllTooLarge: return "EllTooLarge";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

} // namespace netpot
