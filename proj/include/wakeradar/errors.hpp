#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wakeradar {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument lies outside the domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Array or cube dimensions disagree with the radar configuration.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The input carries no usable information (e.g. an all-zero spectrum).
class UndefinedInputError : public Error {
public:
    using Error::Error;
};

/// Every spectral cell is masked, so there is no dominant Doppler to pick.
class NoCandidateError : public Error {
public:
    using Error::Error;
};

/// Too few spectrogram slices carry a ridge above the noise.
class InsufficientSignalError : public Error {
public:
    using Error::Error;
};

/// A tracker operation needs at least one aircraft association.
class NoStateError : public Error {
public:
    using Error::Error;
};

/// Malformed file or configuration. `offset` is a byte offset for binary
/// formats and a line number for text formats (0 when not applicable).
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset = 0)
        : Error(what), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace wakeradar
