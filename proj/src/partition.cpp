#include "btbd/partition.hpp"

namespace btbd {

std::pair<Region, Region> split_region(const Region& r, Axis axis, int position) {
    Region a = r, b = r;
    switch (axis) {
        case Axis::X:
            a.x1 = r.x0 + position;
            b.x0 = r.x0 + position;
            break;
        case Axis::Y:
            a.y1 = r.y0 + position;
            b.y0 = r.y0 + position;
            break;
        case Axis::P:
            a.p1 = r.p0 + position;
            b.p0 = r.p0 + position;
            break;
    }
    return {a, b};
}

int region_symbol_profile(const DataMap& map, const Region& region, int* symbol_out) {
    int first = -1;
    for (int p = region.p0; p < region.p1; ++p)
        for (int y = region.y0; y < region.y1; ++y) {
            const size_t base = map.idx(p, y, 0);
            for (int x = region.x0; x < region.x1; ++x) {
                if (map.dontcare[base + x]) continue;
                const int v = map.symbols[base + x];
                if (first < 0)
                    first = v;
                else if (v != first)
                    return 2;
            }
        }
    if (symbol_out != nullptr) *symbol_out = first;
    return first < 0 ? -1 : 1;
}

SplitChoice best_split(const DataMap& map, const Region& region, EstimatorScratch& scratch) {
    SplitChoice best;
    const bool bitmap = is_bitmap(map.kind);
    auto consider = [&](Axis axis, int extent, int position) {
        const auto [a, b] = split_region(region, axis, position);
        const uint64_t cost = estimate_code_length(map, a, scratch) +
                              estimate_code_length(map, b, scratch) +
                              split_signal_bits(map, axis, extent);
        if (!best.found || cost < best.cost) {
            best = {true, axis, position, cost};
        }
    };
    auto sweep = [&](Axis axis, int extent) {
        if (extent < 2) return;
        if (bitmap) {
            for (int s = 1; s < extent; ++s) consider(axis, extent, s);
        } else {
            consider(axis, extent, (extent - 1 + 1) / 2);  // ceil((extent-1)/2)
        }
    };
    sweep(Axis::X, region.extent_x());
    sweep(Axis::Y, region.extent_y());
    if (map.planes > 1) sweep(Axis::P, region.extent_p());
    return best;
}

std::unique_ptr<PartitionNode> decompose(const DataMap& map, const Region& region,
                                         EstimatorScratch& scratch) {
    auto node = std::make_unique<PartitionNode>();
    node->region = region;

    int symbol = 0;
    const int profile = region_symbol_profile(map, region, &symbol);
    if (profile < 2) {
        node->code = (profile < 1 || symbol == 0) ? NodeCode::LeafZero : NodeCode::LeafSame;
        node->same_value = profile == 1 ? symbol : 0;
        return node;  // flat/realized cost 0: content is implied by the node symbol
    }

    node->flat_bits = estimate_code_length(map, region, scratch);
    const SplitChoice choice = best_split(map, region, scratch);
    if (choice.found) {
        const auto [a, b] = split_region(region, choice.axis, choice.position);
        auto first = decompose(map, a, scratch);
        auto second = decompose(map, b, scratch);
        const uint64_t split_cost =
            first->realized_bits + second->realized_bits +
            split_signal_bits(map, choice.axis,
                              choice.axis == Axis::X   ? region.extent_x()
                              : choice.axis == Axis::Y ? region.extent_y()
                                                       : region.extent_p());
        if (split_cost < node->flat_bits) {
            node->code = axis_node_code(choice.axis);
            node->position = choice.position;
            node->realized_bits = split_cost;
            node->first = std::move(first);
            node->second = std::move(second);
            return node;
        }
    }
    node->code = NodeCode::LeafMixed;
    node->realized_bits = node->flat_bits;
    return node;
}

}  // namespace btbd
