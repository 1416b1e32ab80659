#pragma once

#include <cstdint>
#include <vector>

#include "btbd/common.hpp"
#include "btbd/frame.hpp"

namespace btbd {

struct MotionVector {
    int x = 0;
    int y = 0;
    bool operator==(const MotionVector&) const = default;
};

/**
 * Progressive reconstruction of the frame being coded. `written` tracks
 * which samples exist yet; the intra predictor may only read written cells.
 */
struct ReconBuffer {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> values;
    std::vector<uint8_t> written;

    ReconBuffer() = default;
    ReconBuffer(int w, int h)
        : width(w), height(h), values(static_cast<size_t>(w) * h, 0),
          written(static_cast<size_t>(w) * h, 0) {}

    size_t idx(int r, int c) const { return static_cast<size_t>(r) * width + c; }
    bool has(int r, int c) const {
        return r >= 0 && c >= 0 && r < height && c < width && written[idx(r, c)];
    }
    int value(int r, int c) const { return values[idx(r, c)]; }
    void set(int r, int c, uint8_t v) {
        values[idx(r, c)] = v;
        written[idx(r, c)] = 1;
    }

    DepthFrame to_frame() const {
        DepthFrame f(width, height);
        f.samples = values;
        return f;
    }
};

/**
 * Gradient-adjusted prediction from the seven causal neighbors
 * (W, N, NW, NE, WW, NN, NNE) with gradient thresholds 80/32/8.
 * Unavailable neighbors fall back deterministically:
 *   W->N->128, N->W, NW->N, NE->N, WW->W, NN->N, NNE->NE;
 * a frame's very first sample predicts 128. Result clamped to [0,255].
 *
 * `overlay`/`overlay_rect` optionally supply in-flight samples for the CU
 * being simulated: cells of the rect that precede (row,col) in raster order
 * are read from the overlay instead of the buffer.
 */
int gap_predict(const ReconBuffer& recon, int row, int col,
                const uint8_t* overlay = nullptr, const CuRect* overlay_rect = nullptr);

/** Sum of absolute differences between a CU in `cur` and a displaced block in `ref`. */
uint64_t block_sad(const DepthFrame& cur, const DepthFrame& ref, const CuRect& rect,
                   const MotionVector& mv);

/**
 * Full-pel large/small-diamond search around (0,0), clipped to |x|,|y| <=
 * search_range and to displaced blocks fully inside the frame. Ties prefer
 * smaller |x|+|y|, then smaller y, then smaller x.
 */
struct MotionResult {
    MotionVector mv;
    uint64_t sad = 0;
};
MotionResult diamond_search(const DepthFrame& cur, const DepthFrame& ref, const CuRect& rect,
                            int search_range);

/** Signed exp-Golomb bit cost of one motion vector (both components). */
inline uint64_t estimate_mv_bits(const MotionVector& mv) {
    auto comp = [](int c) {
        const unsigned mag = static_cast<unsigned>(c < 0 ? -c : c);
        return 2ull * static_cast<uint64_t>(ceil_log2(mag + 1)) + 1;
    };
    return comp(mv.x) + comp(mv.y);
}

}  // namespace btbd
