#include "btbd/map_codec.hpp"

#include "btbd/exp_golomb.hpp"
#include "btbd/range_coder.hpp"

namespace btbd {

namespace {

// Any legal root-to-leaf path shortens one axis per split, so depth is bounded
// by the summed extents; this guard only trips on corrupt streams.
constexpr int kMaxTreeDepth = 3 * kMaxDim;

std::vector<size_t> coded_cells_raster(const DataMap& map, const Region& r) {
    std::vector<size_t> cells;
    for (int p = r.p0; p < r.p1; ++p)
        for (int y = r.y0; y < r.y1; ++y) {
            const size_t base = map.idx(p, y, 0);
            for (int x = r.x0; x < r.x1; ++x)
                if (!map.dontcare[base + x]) cells.push_back(base + x);
        }
    return cells;
}

// ---- zero-run mode (residual maps) ------------------------------------------

void run_encode(const DataMap& map, BitSink& sink) {
    const auto cells = coded_cells_raster(map, Region::whole(map));
    size_t i = 0;
    while (i < cells.size()) {
        size_t run = 0;
        while (i + run < cells.size() && map.symbols[cells[i + run]] == 0) ++run;
        eg_encode_unsigned(sink, run);
        i += run;
        if (i < cells.size()) {
            eg_encode_unsigned(sink, static_cast<uint64_t>(map.symbols[cells[i]]) - 1);
            ++i;
        }
    }
}

void run_decode(DataMap& map, BitSource& src) {
    const auto cells = coded_cells_raster(map, Region::whole(map));
    size_t i = 0;
    while (i < cells.size()) {
        const uint64_t run = eg_decode_unsigned(src);
        if (run > cells.size() - i) throw DecodeError("zero-run exceeds map");
        for (uint64_t j = 0; j < run; ++j) map.symbols[cells[i + j]] = 0;
        i += run;
        if (i < cells.size()) {
            const uint64_t v = eg_decode_unsigned(src) + 1;
            if (v > static_cast<uint64_t>(map.alphabet_bound))
                throw DecodeError("run-mode symbol above alphabet bound");
            map.symbols[cells[i]] = static_cast<uint8_t>(v);
            ++i;
        }
    }
}

// ---- partition-tree serialisation -------------------------------------------

int axis_extent(const Region& r, NodeCode code) {
    switch (code) {
        case NodeCode::SplitX: return r.extent_x();
        case NodeCode::SplitY: return r.extent_y();
        default: return r.extent_p();
    }
}

void write_tree(const PartitionNode& node, const DataMap& map, BitSink& sink) {
    write_node_code(sink, node.code, is_bitmap(map.kind));
    if (node.is_leaf()) return;
    if (is_bitmap(map.kind)) {
        const int extent = axis_extent(node.region, node.code);
        const int width = ceil_log2(extent - 1);
        if (width > 0) sink.write_bits(static_cast<uint64_t>(node.position - 1), width);
    }
    write_tree(*node.first, map, sink);
    write_tree(*node.second, map, sink);
}

std::unique_ptr<PartitionNode> read_tree(const DataMap& map, const Region& region,
                                         BitSource& src, int depth) {
    if (depth > kMaxTreeDepth) throw DecodeError("partition tree too deep");
    auto node = std::make_unique<PartitionNode>();
    node->region = region;
    node->code = read_node_code(src, is_bitmap(map.kind));
    if (node->is_leaf()) return node;

    Axis axis;
    switch (node->code) {
        case NodeCode::SplitX: axis = Axis::X; break;
        case NodeCode::SplitY: axis = Axis::Y; break;
        default:
            axis = Axis::P;
            if (map.planes < 2) throw DecodeError("plane split in a 2D map");
    }
    const int extent = axis_extent(region, node->code);
    if (extent < 2) throw DecodeError("split along a unit axis");
    if (is_bitmap(map.kind)) {
        const int width = ceil_log2(extent - 1);
        node->position = width > 0 ? static_cast<int>(src.read_bits(width)) + 1 : 1;
        if (node->position >= extent) throw DecodeError("split position out of range");
    } else {
        node->position = (extent - 1 + 1) / 2;
    }
    const auto [a, b] = split_region(region, axis, node->position);
    node->first = read_tree(map, a, src, depth + 1);
    node->second = read_tree(map, b, src, depth + 1);
    return node;
}

// ---- arithmetic coding of leaf contents --------------------------------------

struct LeafLists {
    std::vector<PartitionNode*> same;   // type II, pre-order
    std::vector<PartitionNode*> mixed;  // type III, pre-order
};

void collect_leaves(PartitionNode& node, LeafLists& out) {
    if (node.code == NodeCode::LeafSame) {
        out.same.push_back(&node);
    } else if (node.code == NodeCode::LeafMixed) {
        out.mixed.push_back(&node);
    } else if (!node.is_leaf()) {
        collect_leaves(*node.first, out);
        collect_leaves(*node.second, out);
    }
}

/**
 * Fills type I/II leaf contents into the symbol grid and marks them known.
 * Encoder and decoder both run this between tree and content coding, so the
 * context state they feed the arithmetic coder is identical.
 */
void seal_plain_leaves(const PartitionNode& node, DataMap& map, std::vector<uint8_t>& known) {
    if (node.code == NodeCode::LeafZero || node.code == NodeCode::LeafSame) {
        const int v = node.code == NodeCode::LeafSame ? node.same_value : 0;
        for (int p = node.region.p0; p < node.region.p1; ++p)
            for (int y = node.region.y0; y < node.region.y1; ++y) {
                const size_t base = map.idx(p, y, 0);
                for (int x = node.region.x0; x < node.region.x1; ++x)
                    if (!map.dontcare[base + x]) {
                        map.symbols[base + x] = static_cast<uint8_t>(v);
                        known[base + x] = 1;
                    }
            }
    } else if (!node.is_leaf()) {
        seal_plain_leaves(*node.first, map, known);
        seal_plain_leaves(*node.second, map, known);
    }
}

std::vector<uint32_t> model_alphabets(const DataMap& map, bool with_context, bool with_snz) {
    const int k = with_context ? context_model(map.kind).context_count : 1;
    std::vector<uint32_t> sizes(k, static_cast<uint32_t>(map.alphabet_bound) + 1);
    if (with_snz) sizes.push_back(static_cast<uint32_t>(map.alphabet_bound));  // values 1..R
    return sizes;
}

uint64_t mixed_cell_count(const DataMap& map, const LeafLists& leaves) {
    uint64_t n = 0;
    for (const auto* leaf : leaves.mixed) n += coded_cells_raster(map, leaf->region).size();
    return n;
}

// Walks type III contents in pre-order, raster within each leaf.
template <typename CellFn>
void walk_mixed(const DataMap& map, const LeafLists& leaves, CellFn&& fn) {
    for (const auto* leaf : leaves.mixed) {
        const Region& r = leaf->region;
        for (int p = r.p0; p < r.p1; ++p)
            for (int y = r.y0; y < r.y1; ++y) {
                const size_t base = map.idx(p, y, 0);
                for (int x = r.x0; x < r.x1; ++x)
                    if (!map.dontcare[base + x]) fn(base + x, p, y, x);
            }
    }
}

void encode_partitioned(const DataMap& map, PartitionNode& tree, bool with_context,
                        BitSink& sink) {
    write_tree(tree, map, sink);
    LeafLists leaves;
    collect_leaves(tree, leaves);
    const bool intmap = !is_bitmap(map.kind);
    const uint64_t symbols = (intmap ? leaves.same.size() : 0) + mixed_cell_count(map, leaves);
    if (symbols == 0) return;

    // The encoder's map already holds the true symbols; the known grid gates
    // visibility so contexts match what the decoder will reconstruct.
    DataMap view = map;
    std::vector<uint8_t> known(map.cell_count(), 0);
    seal_plain_leaves(tree, view, known);

    AdaptiveModel model(model_alphabets(map, with_context, intmap));
    RangeEncoder enc(sink);
    if (intmap) {
        const uint32_t snz_ctx = model.context_count() - 1;
        for (const auto* leaf : leaves.same)
            model.encode(enc, snz_ctx, static_cast<uint32_t>(leaf->same_value) - 1);
    }
    walk_mixed(map, leaves, [&](size_t i, int p, int y, int x) {
        const uint32_t ctx = with_context
                                 ? static_cast<uint32_t>(
                                       internal::context_with_visibility(view, p, y, x, &known))
                                 : 0u;
        model.encode(enc, ctx, map.symbols[i]);
        view.symbols[i] = map.symbols[i];
        known[i] = 1;
    });
    enc.flush();
}

void decode_partitioned(DataMap& map, bool with_context, BitSource& src) {
    const auto tree = read_tree(map, Region::whole(map), src, 0);
    LeafLists leaves;
    collect_leaves(*tree, leaves);
    const bool intmap = !is_bitmap(map.kind);
    if (!intmap)
        for (auto* leaf : leaves.same) leaf->same_value = 1;  // implied for bitmaps
    else if (!leaves.same.empty() && map.alphabet_bound < 1)
        throw DecodeError("nonzero leaf in an empty alphabet");
    const uint64_t symbols = (intmap ? leaves.same.size() : 0) + mixed_cell_count(map, leaves);

    std::vector<uint8_t> known(map.cell_count(), 0);
    if (symbols == 0) {
        seal_plain_leaves(*tree, map, known);
        return;
    }

    AdaptiveModel model(model_alphabets(map, with_context, intmap));
    RangeDecoder dec(src);
    if (intmap) {
        const uint32_t snz_ctx = model.context_count() - 1;
        for (auto* leaf : leaves.same)
            leaf->same_value = static_cast<int>(model.decode(dec, snz_ctx)) + 1;
    }
    seal_plain_leaves(*tree, map, known);
    walk_mixed(map, leaves, [&](size_t i, int p, int y, int x) {
        const uint32_t ctx = with_context
                                 ? static_cast<uint32_t>(
                                       internal::context_with_visibility(map, p, y, x, &known))
                                 : 0u;
        map.symbols[i] = static_cast<uint8_t>(model.decode(dec, ctx));
        known[i] = 1;
    });
}

void encode_whole(const DataMap& map, bool with_context, BitSink& sink) {
    bool any = false;
    for (size_t i = 0; i < map.cell_count() && !any; ++i) any = !map.dontcare[i];
    if (!any) return;
    std::vector<uint8_t> known(map.cell_count(), 0);
    AdaptiveModel model(model_alphabets(map, with_context, false));
    RangeEncoder enc(sink);
    for (int p = 0; p < map.planes; ++p)
        for (int y = 0; y < map.rows; ++y) {
            const size_t base = map.idx(p, y, 0);
            for (int x = 0; x < map.cols; ++x) {
                const size_t i = base + x;
                if (map.dontcare[i]) continue;
                const uint32_t ctx =
                    with_context
                        ? static_cast<uint32_t>(internal::context_with_visibility(map, p, y, x, &known))
                        : 0u;
                model.encode(enc, ctx, map.symbols[i]);
                known[i] = 1;
            }
        }
    enc.flush();
}

void decode_whole(DataMap& map, bool with_context, BitSource& src) {
    bool any = false;
    for (size_t i = 0; i < map.cell_count() && !any; ++i) any = !map.dontcare[i];
    if (!any) return;
    std::vector<uint8_t> known(map.cell_count(), 0);
    AdaptiveModel model(model_alphabets(map, with_context, false));
    RangeDecoder dec(src);
    for (int p = 0; p < map.planes; ++p)
        for (int y = 0; y < map.rows; ++y) {
            const size_t base = map.idx(p, y, 0);
            for (int x = 0; x < map.cols; ++x) {
                const size_t i = base + x;
                if (map.dontcare[i]) continue;
                const uint32_t ctx =
                    with_context
                        ? static_cast<uint32_t>(internal::context_with_visibility(map, p, y, x, &known))
                        : 0u;
                map.symbols[i] = static_cast<uint8_t>(model.decode(dec, ctx));
                known[i] = 1;
            }
        }
}

}  // namespace

void encode_map_payload(const DataMap& map, MapCodingMode mode, BitSink& sink) {
    switch (mode) {
        case MapCodingMode::PartitionedContext:
        case MapCodingMode::PartitionedContextFree: {
            EstimatorScratch scratch;
            const auto tree = decompose(map, Region::whole(map), scratch);
            encode_partitioned(map, *tree, mode == MapCodingMode::PartitionedContext, sink);
            break;
        }
        case MapCodingMode::WholeContext:
            encode_whole(map, true, sink);
            break;
        case MapCodingMode::WholeContextFree:
            encode_whole(map, false, sink);
            break;
        case MapCodingMode::ZeroRun:
            if (map.kind != MapKind::Residual)
                throw InputError("zero-run mode is residual-only");
            run_encode(map, sink);
            break;
    }
}

MapEncodeInfo encode_map(const DataMap& map, BitSink& sink) {
    MapEncodeInfo info;
    info.candidate_count = map.kind == MapKind::Residual ? 5 : 4;

    EstimatorScratch scratch;
    const auto tree = decompose(map, Region::whole(map), scratch);

    for (int m = 0; m < info.candidate_count; ++m) {
        BitSink trial;
        const auto mode = static_cast<MapCodingMode>(m);
        if (mode == MapCodingMode::PartitionedContext ||
            mode == MapCodingMode::PartitionedContextFree) {
            encode_partitioned(map, *tree, mode == MapCodingMode::PartitionedContext, trial);
        } else {
            encode_map_payload(map, mode, trial);
        }
        info.candidate_bits[m] = trial.size_bits();
        if (m == 0 || info.candidate_bits[m] < info.payload_bits) {
            info.chosen = mode;
            info.payload_bits = info.candidate_bits[m];
        }
    }

    sink.write_bits(static_cast<uint64_t>(info.chosen), map_mode_signal_bits(map.kind));
    if (map.kind == MapKind::Residual)
        sink.write_bits(static_cast<uint64_t>(map.alphabet_bound), 8);
    if (info.chosen == MapCodingMode::PartitionedContext ||
        info.chosen == MapCodingMode::PartitionedContextFree) {
        encode_partitioned(map, *tree, info.chosen == MapCodingMode::PartitionedContext, sink);
    } else {
        encode_map_payload(map, info.chosen, sink);
    }
    return info;
}

void decode_map(DataMap& map, BitSource& src) {
    const int signal_bits = map_mode_signal_bits(map.kind);
    const uint64_t mode_raw = src.read_bits(signal_bits);
    if (mode_raw > 4 || (mode_raw == 4 && map.kind != MapKind::Residual))
        throw DecodeError("invalid map coding mode");
    if (map.kind == MapKind::Residual)
        map.alphabet_bound = static_cast<int>(src.read_bits(8));
    switch (static_cast<MapCodingMode>(mode_raw)) {
        case MapCodingMode::PartitionedContext: decode_partitioned(map, true, src); break;
        case MapCodingMode::PartitionedContextFree: decode_partitioned(map, false, src); break;
        case MapCodingMode::WholeContext: decode_whole(map, true, src); break;
        case MapCodingMode::WholeContextFree: decode_whole(map, false, src); break;
        case MapCodingMode::ZeroRun: run_decode(map, src); break;
    }
}

}  // namespace btbd
