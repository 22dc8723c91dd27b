#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skinvid {

enum class ErrorCode {
    EmptyClass,
    InvalidAlpha,
    InvalidBins,
    InvalidBin,
    InvalidThreshold,
    InvalidFrame,
    HashMismatch,
    EmptySeries,
    EmptyVideo,
    OutOfRange,
    InvalidRule,
    EmptyInput,
    VersionMismatch,
    CorruptFile,
    ColorspaceMismatch,
    BadHeader,
    TruncatedStream,
    DimensionMismatch,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace skinvid
