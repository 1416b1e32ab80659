#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "btbd/common.hpp"

namespace btbd {

/** One 8-bit depth map; dimensions are always multiples of 64 (edge-padded). */
struct DepthFrame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> samples;  // row-major

    DepthFrame() = default;
    DepthFrame(int w, int h, uint8_t fill = 0)
        : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

    uint8_t at(int row, int col) const { return samples[static_cast<size_t>(row) * width + col]; }
    uint8_t& at(int row, int col) { return samples[static_cast<size_t>(row) * width + col]; }
};

/** Frame run plus the pre-padding dimensions used for I/O and metrics. */
struct Sequence {
    std::vector<DepthFrame> frames;
    int original_width = 0;
    int original_height = 0;
};

/** Square coding-unit rectangle; size is one of 64/32/16/8. */
struct CuRect {
    int row = 0;
    int col = 0;
    int size = 0;
};

/** Rounds up to the next multiple of 64. */
int padded_dim(int dim);

/** Edge-replicates a raw frame out to multiple-of-64 dimensions. */
DepthFrame pad_frame(const uint8_t* data, int width, int height);

/** Raw 8-bit frames, tightly packed. frame_count == 0 derives it from file size. */
Sequence load_raw(const std::string& path, int width, int height, int frame_count);

/** One or more concatenated binary PGM (P5, maxval<=255) images of equal size. */
Sequence load_pgm(const std::string& path);

/** Writes the original (cropped) region of every frame, tightly packed. */
void store_raw(const Sequence& seq, const std::string& path);

/** Writes concatenated P5 images over the original region. */
void store_pgm(const Sequence& seq, const std::string& path);

/**
 * PSNR in dB over the top-left region_w x region_h window (peak 255);
 * +infinity for identical content.
 */
double psnr(const DepthFrame& a, const DepthFrame& b, int region_w = -1, int region_h = -1);

/** Aggregate PSNR across frames from summed squared error over the region. */
double sequence_psnr(const Sequence& a, const Sequence& b);

}  // namespace btbd
