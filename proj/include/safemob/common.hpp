#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace safemob {

/// Seconds since the Unix epoch, UTC.
using UnixTime = std::int64_t;

enum class ErrorKind {
    InvalidArgument,
    Parse,
    NotFound,
    Conflict,
    Unauthorized,
    Io,
};

/// Single exception type for the library; `kind()` lets the API layer map
/// failures onto status codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

enum class TravelMode { Walk, Car };

std::string_view to_string(TravelMode mode) noexcept;
TravelMode travel_mode_from_string(std::string_view text);

}  // namespace safemob
