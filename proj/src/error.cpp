#include "skinvid/error.hpp"

namespace skinvid {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidBins: return "InvalidBins";
    case ErrorCode::InvalidBin: return "InvalidBin";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::EmptyVideo: return "EmptyVideo";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::ColorspaceMismatch: return "ColorspaceMismatch";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::TruncatedStream: return "TruncatedStream";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace skinvid
