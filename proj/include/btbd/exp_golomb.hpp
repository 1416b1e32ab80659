#pragma once

#include <cstdint>
#include <vector>

#include "btbd/bitio.hpp"
#include "btbd/common.hpp"

namespace btbd {

/** Order-0 exp-Golomb code of u >= 0: bit_width(u+1)-1 zeros, then u+1 in binary. */
inline void eg_encode_unsigned(BitSink& sink, uint64_t u) {
    const int nb = std::bit_width(u + 1);
    sink.write_bits(0, nb - 1);
    sink.write_bits(u + 1, nb);
}

inline uint64_t eg_decode_unsigned(BitSource& src) {
    int zeros = 0;
    while (src.read_bit() == 0) {
        if (++zeros > 63) throw DecodeError("exp-Golomb prefix overrun");
    }
    uint64_t v = 1;
    for (int i = 0; i < zeros; ++i) v = (v << 1) | src.read_bits(1);
    return v - 1;
}

inline uint64_t eg_length_unsigned(uint64_t u) {
    return 2ull * static_cast<uint64_t>(std::bit_width(u + 1)) - 1;
}

/** Signed mapping: v>0 -> 2v-1, v<=0 -> -2v, then order-0 exp-Golomb. */
inline void eg_encode_signed(BitSink& sink, int64_t v) {
    eg_encode_unsigned(sink, v > 0 ? static_cast<uint64_t>(2 * v - 1)
                                   : static_cast<uint64_t>(-2 * v));
}

inline int64_t eg_decode_signed(BitSource& src) {
    const uint64_t u = eg_decode_unsigned(src);
    return (u & 1) ? static_cast<int64_t>((u + 1) / 2) : -static_cast<int64_t>(u / 2);
}

inline uint64_t eg_length_signed(int64_t v) {
    return eg_length_unsigned(v > 0 ? static_cast<uint64_t>(2 * v - 1)
                                    : static_cast<uint64_t>(-2 * v));
}

/**
 * Modified signed exp-Golomb for a batch known to contain no zeros: a one-bit
 * majority-sign flag, then every majority-sign value shifted one step toward
 * zero before the regular signed code (minority values pass through).
 */
void meg_encode(BitSink& sink, const std::vector<int>& values);
std::vector<int> meg_decode(BitSource& src, size_t count);

}  // namespace btbd
