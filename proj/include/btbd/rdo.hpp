#pragma once

#include <cstdint>
#include <vector>

#include "btbd/code_length.hpp"
#include "btbd/data_map.hpp"
#include "btbd/frame.hpp"
#include "btbd/prediction.hpp"
#include "btbd/quant.hpp"

namespace btbd {

/** Per-CU prediction modes; the numeric values are the mode-map code words. */
enum class PredictionMode : uint8_t {
    Intra = 0,   // gradient-adjusted spatial prediction
    Skip = 1,    // co-located copy, no residual payload
    InterZ = 2,  // zero-motion compensation with residual
    InterM = 3,  // motion compensation, MV != (0,0)
};

/** One leaf coding unit of a decided CTU quad-tree. */
struct CuDecision {
    CuRect rect;
    PredictionMode mode = PredictionMode::Intra;
    MotionVector mv{};
    std::vector<uint8_t> ranks;  // size*size quantised-residual ranks; empty for Skip
    uint64_t estimated_bits = 0;
};

/** A mode decision bundled with the reconstruction it produces. */
struct CuCandidate {
    CuDecision decision;
    std::vector<uint8_t> recon;  // size*size block
};

/** Shared state for deciding one frame. */
struct FrameCodingContext {
    const DepthFrame* original = nullptr;   // padded frame being coded
    const DepthFrame* reference = nullptr;  // padded reconstruction of the previous frame
    ReconBuffer* recon = nullptr;           // progressive current-frame reconstruction
    QuantConfig quant{1};
    int search_range = 32;
    EstimatorScratch* scratch = nullptr;

    bool intra_only() const { return reference == nullptr; }
};

/** Estimated code length of one CU's rank block, evaluated in isolation. */
uint64_t estimate_residual_bits(const std::vector<uint8_t>& ranks, int size,
                                const QuantConfig& quant, EstimatorScratch& scratch);

/**
 * Decides the cheapest prediction mode of one CU: Skip whenever the zero-motion
 * quantised residual vanishes, otherwise the minimum of estimated residual bits
 * over spatial prediction, zero-motion and motion-compensated candidates (the
 * latter charged its vector's signed exp-Golomb cost). Intra-only frames skip
 * the inter candidates. Does not modify the reconstruction buffer.
 */
CuCandidate select_cu_mode(const FrameCodingContext& ctx, const CuRect& rect);

struct CtuTree {
    std::vector<CuDecision> leaves;  // depth-first quadrant order
    uint64_t estimated_bits = 0;
};

/**
 * Greedy top-down quad-tree decision over one 64-aligned CTU: a node splits
 * only when the four children's best costs plus a one-bit division flag beat
 * its own undivided cost. Commits the winning reconstruction into ctx.recon
 * so later intra predictions stay causal.
 */
CtuTree build_ctu_tree(FrameCodingContext& ctx, const CuRect& ctu);

/** Runs build_ctu_tree over every CTU in raster order; returns all leaves. */
std::vector<CuDecision> plan_frame(FrameCodingContext& ctx);

/** The six per-frame syntax maps, in stream order. */
struct FrameMaps {
    DataMap div64, div32, div16, mode, mvz, residual;
};

/**
 * Assembles the maps from a frame's leaf decisions. Don't-care masks are built
 * with the same derivation helpers the decoder uses, so they match by
 * construction. The residual map's alphabet bound is the frame's maximum rank.
 */
FrameMaps form_maps(const std::vector<CuDecision>& leaves, int width, int height,
                    const QuantConfig& quant);

// ---- decoder-side mask derivations -------------------------------------------
// Each shell carries the don't-care mask implied by the maps decoded before it;
// values are filled in by the map decoder.

DataMap make_div64_shell(int width, int height);
DataMap make_div32_shell(const DataMap& div64);
DataMap make_div16_shell(const DataMap& div32);

/** Leaf CU rects implied by the three division bitmaps (CTUs in raster order,
 *  quadrants depth-first). */
std::vector<CuRect> build_leaf_rects(const DataMap& div64, const DataMap& div32,
                                     const DataMap& div16, int width, int height);

/** Significance grid over 8-pixel cells: 0 at each leaf's top-left cell, 1 elsewhere. */
std::vector<uint8_t> derive_significance(const std::vector<CuRect>& leaves, int width, int height);

DataMap make_mode_shell(const std::vector<CuRect>& leaves, int width, int height);
DataMap make_mvz_shell(const DataMap& mode);
DataMap make_residual_shell(const DataMap& mode, const std::vector<CuRect>& leaves, int width,
                            int height, const QuantConfig& quant);

}  // namespace btbd
