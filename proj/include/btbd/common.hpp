#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace btbd {

/** Base class for all recoverable codec errors. */
struct CodecError : std::runtime_error {
    explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

/** Bad caller input: malformed files, out-of-domain arguments, size mismatches. */
struct InputError : CodecError {
    explicit InputError(const std::string& what) : CodecError(what) {}
};

/** Corrupt or truncated compressed stream detected while decoding. */
struct DecodeError : CodecError {
    explicit DecodeError(const std::string& what) : CodecError(what) {}
};

/** ceil(log2(n)) for n >= 1; 0 for n == 1. */
inline int ceil_log2(uint64_t n) {
    return n <= 1 ? 0 : std::bit_width(n - 1);
}

/** Nearest-integer division with ties rounded away from zero. */
inline int round_div(int value, int divisor) {
    const int mag = value < 0 ? -value : value;
    const int q = (mag + divisor / 2) / divisor;
    return value < 0 ? -q : q;
}

inline int clamp_sample(int v) { return v < 0 ? 0 : (v > 255 ? 255 : v); }

constexpr int kCtuSize = 64;
constexpr int kMinCuSize = 8;
constexpr int kMaxDim = 4096;  // decoder hardening bound on padded dimensions

}  // namespace btbd
