#pragma once

#include <cstdint>
#include <vector>

#include "btbd/bitio.hpp"
#include "btbd/common.hpp"
#include "btbd/frame.hpp"
#include "btbd/prediction.hpp"

namespace btbd {

/** Per-frame motion payload modes, signalled in two bits. */
enum class MvCodingMode : uint8_t {
    PredictedGolomb = 0,      // median-predicted differences, signed exp-Golomb
    PredictedArithmetic = 1,  // median-predicted differences, adaptive arithmetic
    DirectGolomb = 2,         // raw components, majority-sign modified exp-Golomb
    DirectArithmetic = 3,     // raw components, adaptive arithmetic over [-M,M]\{0}
};

/**
 * One motion-compensated CU, listed in row-major order of its top-left pixel.
 * Only components flagged `coded_*` travel in the payload; the flags mirror the
 * zero-component bitmap, so a flagged component is always nonzero.
 */
struct MvRecord {
    CuRect rect;
    MotionVector mv{};
    bool coded_x = false;
    bool coded_y = false;
};

struct MvEncodeInfo {
    bool signalled = false;  // false when the frame has no motion-compensated CU
    MvCodingMode chosen = MvCodingMode::PredictedGolomb;
    uint64_t payload_bits = 0;     // excludes the 2-bit mode signal
    uint64_t candidate_bits[4] = {0, 0, 0, 0};
};

/**
 * Median prediction for the CU at `index`: component-wise median over the
 * motion-compensated CUs covering the cell to the left of the top-left corner,
 * the cell above it, and the cell above the top-right corner (8-pixel grid).
 * All three precede `index` in row-major order, so the predictor is causal.
 * Missing neighbours shrink the median (two -> rounded mean, one -> identity,
 * none -> zero).
 */
MotionVector predicted_mv(const std::vector<MvRecord>& cus, int frame_width, int frame_height,
                          size_t index);

/** Tries all four modes on the flagged components and writes signal + payload. */
MvEncodeInfo encode_mv_field(const std::vector<MvRecord>& cus, int frame_width, int frame_height,
                             int search_range, BitSink& sink);

/** Fills the flagged components of `cus`; validates range and nonzero-ness. */
void decode_mv_field(std::vector<MvRecord>& cus, int frame_width, int frame_height,
                     int search_range, BitSource& src);

}  // namespace btbd
