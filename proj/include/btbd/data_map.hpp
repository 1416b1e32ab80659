#pragma once

#include <cstdint>
#include <vector>

#include "btbd/common.hpp"

namespace btbd {

/** The six frame-level syntax maps, in their stream order. */
enum class MapKind : uint8_t {
    Div64,     // 2D bitmap, one flag per 64x64 CTU
    Div32,     // 2D bitmap, flags of 32x32 blocks under split CTUs
    Div16,     // 2D bitmap, flags of 16x16 blocks under split 32-blocks
    Mode,      // 2D integer map over the 8x8 grid, alphabet {0..3}
    Mvz,       // 3D bitmap (2 planes x 8x8 grid): nonzero flags of MV components
    Residual,  // 2D integer map of residual ranks over pixels
};

inline bool is_bitmap(MapKind k) { return k != MapKind::Mode && k != MapKind::Residual; }

/**
 * A 2D/3D symbol grid with a don't-care mask. Cells under the mask carry no
 * payload; the decoder reconstructs every mask from previously decoded maps.
 */
struct DataMap {
    MapKind kind = MapKind::Div64;
    int planes = 1;
    int rows = 0;
    int cols = 0;
    int alphabet_bound = 1;  // symbols live in [0, alphabet_bound]
    int quant_step = 1;      // residual maps: q, for neighbor magnitude contexts
    std::vector<uint8_t> symbols;
    std::vector<uint8_t> dontcare;
    // Mode maps only: flat index of the covering leaf CU's top-left cell, used
    // by the masked-neighbor context substitution. Same grid as symbols.
    std::vector<int32_t> cover_cell;

    DataMap() = default;
    DataMap(MapKind k, int p, int r, int c, int bound)
        : kind(k), planes(p), rows(r), cols(c), alphabet_bound(bound),
          symbols(static_cast<size_t>(p) * r * c, 0),
          dontcare(static_cast<size_t>(p) * r * c, 0) {}

    size_t idx(int p, int r, int c) const {
        return (static_cast<size_t>(p) * rows + r) * cols + c;
    }
    size_t cell_count() const { return static_cast<size_t>(planes) * rows * cols; }
    int value(int p, int r, int c) const { return symbols[idx(p, r, c)]; }
    bool masked(int p, int r, int c) const { return dontcare[idx(p, r, c)] != 0; }
};

/** Cuboid region [p0,p1) x [y0,y1) x [x0,x1) of a map. */
struct Region {
    int p0 = 0, p1 = 1;
    int y0 = 0, y1 = 0;
    int x0 = 0, x1 = 0;

    static Region whole(const DataMap& m) { return {0, m.planes, 0, m.rows, 0, m.cols}; }
    int extent_p() const { return p1 - p0; }
    int extent_y() const { return y1 - y0; }
    int extent_x() const { return x1 - x0; }
    size_t cells() const {
        return static_cast<size_t>(extent_p()) * extent_y() * extent_x();
    }
};

/** Context-model shape attached to each map kind. */
struct ContextModelInfo {
    int context_count;   // k
    int arity;           // n of the nominal positional code (0 for ordinal models)
    bool ordinal;        // residual maps: contexts from binned neighbor magnitudes
};

inline ContextModelInfo context_model(MapKind kind) {
    switch (kind) {
        case MapKind::Mvz: return {8, 2, false};
        case MapKind::Mode: return {16, 4, false};
        case MapKind::Residual: return {4, 0, true};
        default: return {4, 2, false};
    }
}

/** Residual context bin of a summed neighbor magnitude. */
inline int residual_context_bin(int magnitude_sum) {
    if (magnitude_sum <= 4) return 0;
    if (magnitude_sum <= 22) return 1;
    if (magnitude_sum <= 117) return 2;
    return 3;
}

/** Interleave-inverse magnitude of a residual rank: q * ceil(rank/2). */
inline int residual_neighbor_magnitude(int rank, int quant_step) {
    return quant_step * ((rank + 1) / 2);
}

/**
 * Context of a cell from its causal neighbors (left, above, previous plane),
 * reading values straight from the map (estimator view: every unmasked cell
 * is visible). Out-of-bounds neighbors contribute 0; masked neighbors use the
 * kind's substitution rule (mode: covering CU's codeword; others: 0).
 */
int context_of(const DataMap& map, int p, int y, int x);

namespace internal {

/**
 * Same context computation with an optional visibility grid: when `known`
 * is given, unmasked-but-not-yet-(de)coded neighbors contribute 0 and the
 * mode-map substitution only fires if the covering cell is itself known.
 * Encoder and decoder share this during actual arithmetic coding.
 */
int context_with_visibility(const DataMap& map, int p, int y, int x,
                            const std::vector<uint8_t>* known);

}  // namespace internal

}  // namespace btbd
