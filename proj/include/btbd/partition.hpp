#pragma once

#include <memory>

#include "btbd/code_length.hpp"
#include "btbd/data_map.hpp"
#include "btbd/tree_codes.hpp"

namespace btbd {

/** Split axes in tie-break preference order. */
enum class Axis : uint8_t { X, Y, P };

inline NodeCode axis_node_code(Axis a) {
    switch (a) {
        case Axis::X: return NodeCode::SplitX;
        case Axis::Y: return NodeCode::SplitY;
        default: return NodeCode::SplitP;
    }
}

/** Bits to signal a split: axis codeword plus, for bitmaps, the position. */
inline uint64_t split_signal_bits(const DataMap& map, Axis axis, int extent) {
    const uint64_t axis_bits = node_codeword(axis_node_code(axis), is_bitmap(map.kind)).length;
    return axis_bits + (is_bitmap(map.kind) ? static_cast<uint64_t>(ceil_log2(extent - 1)) : 0);
}

struct SplitChoice {
    bool found = false;
    Axis axis = Axis::X;
    int position = 0;       // first cells of the second half along the axis
    uint64_t cost = 0;      // L(first) + L(second) + signal bits
};

/**
 * Greedy best binary split of `region`: bitmaps try every cut position on
 * every available axis, integer maps only the halfway cut
 * ceil((extent-1)/2). Ties resolve by axis order X, Y, P, then smaller
 * position. `found` is false only when the region is a single cell.
 */
SplitChoice best_split(const DataMap& map, const Region& region, EstimatorScratch& scratch);

/** Node of a computed partition tree (children ordered: lower half first). */
struct PartitionNode {
    Region region;
    NodeCode code = NodeCode::LeafZero;
    int position = 0;       // splits only
    int same_value = 0;     // LeafSame only
    uint64_t flat_bits = 0;      // estimated cost of coding the region unsplit
    uint64_t realized_bits = 0;  // estimated cost of the chosen subtree
    std::unique_ptr<PartitionNode> first;
    std::unique_ptr<PartitionNode> second;

    bool is_leaf() const { return code == NodeCode::LeafZero || code == NodeCode::LeafSame ||
                                  code == NodeCode::LeafMixed; }
};

/**
 * Recursive greedy decomposition: regions with at most one distinct coded
 * symbol become type I/II leaves; otherwise the best split's halves are
 * decomposed and the split is kept only if the realized child costs plus the
 * split signalling undercut coding the region whole (else type III leaf).
 */
std::unique_ptr<PartitionNode> decompose(const DataMap& map, const Region& region,
                                         EstimatorScratch& scratch);

/** Halves of a region around `position` along `axis`. */
std::pair<Region, Region> split_region(const Region& r, Axis axis, int position);

/** Number of distinct coded symbols in the region, capped at 2; -1 when empty. */
int region_symbol_profile(const DataMap& map, const Region& region, int* symbol_out);

}  // namespace btbd
