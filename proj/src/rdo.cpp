#include "btbd/rdo.hpp"

#include <algorithm>

namespace btbd {

namespace {

struct ResidualResult {
    std::vector<uint8_t> ranks;
    std::vector<uint8_t> recon;
    bool all_zero = true;
};

/**
 * Quantises, rank-maps and reconstructs one block. The predictor callable
 * receives local coordinates plus the partially filled reconstruction, so a
 * spatial predictor can read causally earlier in-block samples.
 */
template <typename PredFn>
ResidualResult rank_block(const DepthFrame& orig, const CuRect& rect, const QuantConfig& quant,
                          PredFn&& pred) {
    const int m = rect.size;
    ResidualResult res;
    res.ranks.resize(static_cast<size_t>(m) * m);
    res.recon.resize(static_cast<size_t>(m) * m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            const int x_hat = pred(r, c, res.recon.data());
            const int sample = orig.at(rect.row + r, rect.col + c);
            const int eps_q = quantize(sample - x_hat, quant);
            const int pred_q = round_div(x_hat, quant.q);
            const int bound = pred_q + round_div(255 - x_hat, quant.q);
            res.ranks[static_cast<size_t>(r) * m + c] =
                static_cast<uint8_t>(rank_map(eps_q, pred_q, bound));
            res.recon[static_cast<size_t>(r) * m + c] =
                static_cast<uint8_t>(clamp_sample(x_hat + dequantize(eps_q, quant)));
            if (eps_q != 0) res.all_zero = false;
        }
    return res;
}

void commit_block(ReconBuffer& recon, const CuRect& rect, const std::vector<uint8_t>& block) {
    for (int r = 0; r < rect.size; ++r)
        for (int c = 0; c < rect.size; ++c)
            recon.set(rect.row + r, rect.col + c,
                      block[static_cast<size_t>(r) * rect.size + c]);
}

struct RegionSave {
    std::vector<uint8_t> values, written;
};

RegionSave save_region(const ReconBuffer& recon, const CuRect& rect) {
    RegionSave s;
    s.values.reserve(static_cast<size_t>(rect.size) * rect.size);
    s.written.reserve(static_cast<size_t>(rect.size) * rect.size);
    for (int r = 0; r < rect.size; ++r) {
        const size_t base = recon.idx(rect.row + r, rect.col);
        s.values.insert(s.values.end(), recon.values.begin() + base,
                        recon.values.begin() + base + rect.size);
        s.written.insert(s.written.end(), recon.written.begin() + base,
                         recon.written.begin() + base + rect.size);
    }
    return s;
}

void restore_region(ReconBuffer& recon, const CuRect& rect, const RegionSave& s) {
    for (int r = 0; r < rect.size; ++r) {
        const size_t base = recon.idx(rect.row + r, rect.col);
        std::copy_n(s.values.begin() + static_cast<size_t>(r) * rect.size, rect.size,
                    recon.values.begin() + base);
        std::copy_n(s.written.begin() + static_cast<size_t>(r) * rect.size, rect.size,
                    recon.written.begin() + base);
    }
}

uint64_t build_node(FrameCodingContext& ctx, const CuRect& rect, std::vector<CuDecision>& out) {
    CuCandidate undivided = select_cu_mode(ctx, rect);
    const uint64_t undivided_bits = undivided.decision.estimated_bits;
    if (rect.size > kMinCuSize) {
        const RegionSave saved = save_region(*ctx.recon, rect);
        std::vector<CuDecision> child_leaves;
        uint64_t divided_bits = 1;  // division flag
        const int h = rect.size / 2;
        const int offsets[4][2] = {{0, 0}, {0, h}, {h, 0}, {h, h}};
        for (const auto& o : offsets)
            divided_bits += build_node(ctx, {rect.row + o[0], rect.col + o[1], h}, child_leaves);
        if (divided_bits < undivided_bits) {
            std::move(child_leaves.begin(), child_leaves.end(), std::back_inserter(out));
            return divided_bits;
        }
        restore_region(*ctx.recon, rect, saved);
    }
    commit_block(*ctx.recon, rect, undivided.recon);
    out.push_back(std::move(undivided.decision));
    return undivided_bits;
}

int mode_at(const DataMap& mode, const CuRect& rect) {
    return mode.value(0, rect.row / kMinCuSize, rect.col / kMinCuSize);
}

}  // namespace

uint64_t estimate_residual_bits(const std::vector<uint8_t>& ranks, int size,
                                const QuantConfig& quant, EstimatorScratch& scratch) {
    if (ranks.size() != static_cast<size_t>(size) * size)
        throw InputError("rank block size mismatch");
    int bound = quant.range_bound();
    for (uint8_t r : ranks) bound = std::max(bound, static_cast<int>(r));
    DataMap block(MapKind::Residual, 1, size, size, bound);
    block.quant_step = quant.q;
    block.symbols = ranks;
    return estimate_code_length(block, Region::whole(block), scratch, true);
}

CuCandidate select_cu_mode(const FrameCodingContext& ctx, const CuRect& rect) {
    const QuantConfig& quant = ctx.quant;
    CuCandidate best;
    bool have = false;

    auto consider = [&](PredictionMode mode, const MotionVector& mv, ResidualResult&& rr,
                        uint64_t extra_bits) {
        const uint64_t bits =
            estimate_residual_bits(rr.ranks, rect.size, quant, *ctx.scratch) + extra_bits;
        if (!have || bits < best.decision.estimated_bits) {
            best.decision = CuDecision{rect, mode, mv, std::move(rr.ranks), bits};
            best.recon = std::move(rr.recon);
            have = true;
        }
    };

    auto intra_result = [&] {
        return rank_block(*ctx.original, rect, quant, [&](int r, int c, const uint8_t* partial) {
            return gap_predict(*ctx.recon, rect.row + r, rect.col + c, partial, &rect);
        });
    };

    if (ctx.intra_only()) {
        consider(PredictionMode::Intra, MotionVector{}, intra_result(), 0);
        return best;
    }

    const DepthFrame& ref = *ctx.reference;
    auto zero = rank_block(*ctx.original, rect, quant, [&](int r, int c, const uint8_t*) {
        return static_cast<int>(ref.at(rect.row + r, rect.col + c));
    });
    if (zero.all_zero) {
        best.decision = CuDecision{rect, PredictionMode::Skip, MotionVector{}, {}, 0};
        best.recon = std::move(zero.recon);
        return best;
    }

    consider(PredictionMode::Intra, MotionVector{}, intra_result(), 0);
    consider(PredictionMode::InterZ, MotionVector{}, std::move(zero), 0);

    const MotionResult motion = diamond_search(*ctx.original, ref, rect, ctx.search_range);
    if (!(motion.mv == MotionVector{})) {
        auto moved = rank_block(*ctx.original, rect, quant, [&](int r, int c, const uint8_t*) {
            return static_cast<int>(ref.at(rect.row + motion.mv.y + r, rect.col + motion.mv.x + c));
        });
        consider(PredictionMode::InterM, motion.mv, std::move(moved), estimate_mv_bits(motion.mv));
    }
    return best;
}

CtuTree build_ctu_tree(FrameCodingContext& ctx, const CuRect& ctu) {
    if (ctu.size != kCtuSize || ctu.row % kCtuSize != 0 || ctu.col % kCtuSize != 0)
        throw InputError("CTU rect must be 64-aligned");
    CtuTree tree;
    tree.estimated_bits = build_node(ctx, ctu, tree.leaves);
    return tree;
}

std::vector<CuDecision> plan_frame(FrameCodingContext& ctx) {
    if (ctx.original == nullptr || ctx.recon == nullptr || ctx.scratch == nullptr)
        throw InputError("incomplete frame coding context");
    const int w = ctx.original->width, h = ctx.original->height;
    if (w % kCtuSize != 0 || h % kCtuSize != 0 || ctx.recon->width != w || ctx.recon->height != h)
        throw InputError("frame dimensions must be CTU-aligned");
    if (ctx.reference != nullptr && (ctx.reference->width != w || ctx.reference->height != h))
        throw InputError("reference dimensions mismatch");

    std::vector<CuDecision> leaves;
    for (int r = 0; r < h; r += kCtuSize)
        for (int c = 0; c < w; c += kCtuSize) {
            CtuTree tree = build_ctu_tree(ctx, {r, c, kCtuSize});
            std::move(tree.leaves.begin(), tree.leaves.end(), std::back_inserter(leaves));
        }
    return leaves;
}

FrameMaps form_maps(const std::vector<CuDecision>& leaves, int width, int height,
                    const QuantConfig& quant) {
    uint64_t area = 0;
    for (const auto& cu : leaves) {
        const int m = cu.rect.size;
        if (m != 8 && m != 16 && m != 32 && m != 64)
            throw CodecError("illegal leaf size");
        if (cu.rect.row % m != 0 || cu.rect.col % m != 0 || cu.rect.row < 0 || cu.rect.col < 0 ||
            cu.rect.row + m > height || cu.rect.col + m > width)
            throw CodecError("leaf not aligned inside the frame");
        const size_t cells = static_cast<size_t>(m) * m;
        switch (cu.mode) {
            case PredictionMode::Skip:
                if (!(cu.mv == MotionVector{}) || !cu.ranks.empty())
                    throw CodecError("skip leaf carries payload");
                break;
            case PredictionMode::InterZ:
                if (!(cu.mv == MotionVector{})) throw CodecError("zero-motion leaf with vector");
                if (cu.ranks.size() != cells) throw CodecError("rank block size mismatch");
                break;
            case PredictionMode::InterM:
                if (cu.mv == MotionVector{}) throw CodecError("motion leaf without vector");
                if (cu.ranks.size() != cells) throw CodecError("rank block size mismatch");
                break;
            case PredictionMode::Intra:
                if (!(cu.mv == MotionVector{})) throw CodecError("intra leaf with vector");
                if (cu.ranks.size() != cells) throw CodecError("rank block size mismatch");
                break;
        }
        area += cells;
    }
    if (area != static_cast<uint64_t>(width) * height)
        throw CodecError("leaves do not tile the frame");

    FrameMaps maps;
    maps.div64 = make_div64_shell(width, height);
    for (const auto& cu : leaves) {
        const size_t cell = maps.div64.idx(0, cu.rect.row / 64, cu.rect.col / 64);
        if (cu.rect.size < 64) maps.div64.symbols[cell] = 1;
    }

    maps.div32 = make_div32_shell(maps.div64);
    for (const auto& cu : leaves) {
        if (cu.rect.size > 32) continue;
        const size_t cell = maps.div32.idx(0, cu.rect.row / 32, cu.rect.col / 32);
        maps.div32.symbols[cell] = cu.rect.size < 32 ? 1 : 0;
    }

    maps.div16 = make_div16_shell(maps.div32);
    for (const auto& cu : leaves) {
        if (cu.rect.size > 16) continue;
        const size_t cell = maps.div16.idx(0, cu.rect.row / 16, cu.rect.col / 16);
        maps.div16.symbols[cell] = cu.rect.size < 16 ? 1 : 0;
    }

    std::vector<CuRect> rects;
    rects.reserve(leaves.size());
    for (const auto& cu : leaves) rects.push_back(cu.rect);

    maps.mode = make_mode_shell(rects, width, height);
    for (const auto& cu : leaves) {
        const size_t cell = maps.mode.idx(0, cu.rect.row / kMinCuSize, cu.rect.col / kMinCuSize);
        maps.mode.symbols[cell] = static_cast<uint8_t>(cu.mode);
    }

    maps.mvz = make_mvz_shell(maps.mode);
    for (const auto& cu : leaves) {
        if (cu.mode != PredictionMode::InterM) continue;
        const int r8 = cu.rect.row / kMinCuSize, c8 = cu.rect.col / kMinCuSize;
        maps.mvz.symbols[maps.mvz.idx(0, r8, c8)] = cu.mv.x != 0 ? 1 : 0;
        maps.mvz.symbols[maps.mvz.idx(1, r8, c8)] = cu.mv.y != 0 ? 1 : 0;
    }

    maps.residual = make_residual_shell(maps.mode, rects, width, height, quant);
    int max_rank = 0;
    for (const auto& cu : leaves) {
        if (cu.mode == PredictionMode::Skip) continue;
        for (int r = 0; r < cu.rect.size; ++r)
            for (int c = 0; c < cu.rect.size; ++c) {
                const uint8_t rank = cu.ranks[static_cast<size_t>(r) * cu.rect.size + c];
                maps.residual.symbols[maps.residual.idx(0, cu.rect.row + r, cu.rect.col + c)] =
                    rank;
                max_rank = std::max(max_rank, static_cast<int>(rank));
            }
    }
    maps.residual.alphabet_bound = max_rank;
    return maps;
}

DataMap make_div64_shell(int width, int height) {
    if (width <= 0 || height <= 0 || width % kCtuSize != 0 || height % kCtuSize != 0)
        throw InputError("frame dimensions must be CTU-aligned");
    return DataMap(MapKind::Div64, 1, height / kCtuSize, width / kCtuSize, 1);
}

DataMap make_div32_shell(const DataMap& div64) {
    DataMap m(MapKind::Div32, 1, div64.rows * 2, div64.cols * 2, 1);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            m.dontcare[m.idx(0, r, c)] = div64.value(0, r / 2, c / 2) == 0 ? 1 : 0;
    return m;
}

DataMap make_div16_shell(const DataMap& div32) {
    DataMap m(MapKind::Div16, 1, div32.rows * 2, div32.cols * 2, 1);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            const bool open = !div32.masked(0, r / 2, c / 2) && div32.value(0, r / 2, c / 2) == 1;
            m.dontcare[m.idx(0, r, c)] = open ? 0 : 1;
        }
    return m;
}

std::vector<CuRect> build_leaf_rects(const DataMap& div64, const DataMap& div32,
                                     const DataMap& div16, int width, int height) {
    if (width % kCtuSize != 0 || height % kCtuSize != 0 || div64.rows != height / kCtuSize ||
        div64.cols != width / kCtuSize || div32.rows != div64.rows * 2 ||
        div32.cols != div64.cols * 2 || div16.rows != div32.rows * 2 ||
        div16.cols != div32.cols * 2)
        throw InputError("division maps inconsistent with frame dimensions");

    std::vector<CuRect> leaves;
    auto descend = [&](auto&& self, int row, int col, int size) -> void {
        bool split = false;
        if (size == 64)
            split = div64.value(0, row / 64, col / 64) != 0;
        else if (size == 32)
            split = div32.value(0, row / 32, col / 32) != 0;
        else if (size == 16)
            split = div16.value(0, row / 16, col / 16) != 0;
        if (!split) {
            leaves.push_back({row, col, size});
            return;
        }
        const int h = size / 2;
        self(self, row, col, h);
        self(self, row, col + h, h);
        self(self, row + h, col, h);
        self(self, row + h, col + h, h);
    };
    for (int r = 0; r < height; r += kCtuSize)
        for (int c = 0; c < width; c += kCtuSize) descend(descend, r, c, kCtuSize);
    return leaves;
}

std::vector<uint8_t> derive_significance(const std::vector<CuRect>& leaves, int width,
                                         int height) {
    const int rows = height / kMinCuSize, cols = width / kMinCuSize;
    std::vector<uint8_t> sig(static_cast<size_t>(rows) * cols, 1);
    for (const auto& rect : leaves)
        sig[static_cast<size_t>(rect.row / kMinCuSize) * cols + rect.col / kMinCuSize] = 0;
    return sig;
}

DataMap make_mode_shell(const std::vector<CuRect>& leaves, int width, int height) {
    DataMap m(MapKind::Mode, 1, height / kMinCuSize, width / kMinCuSize, 3);
    m.cover_cell.assign(m.cell_count(), -1);
    std::fill(m.dontcare.begin(), m.dontcare.end(), 1);
    for (const auto& rect : leaves) {
        const int r0 = rect.row / kMinCuSize, c0 = rect.col / kMinCuSize;
        const int n = rect.size / kMinCuSize;
        const auto tl = static_cast<int32_t>(m.idx(0, r0, c0));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m.cover_cell[m.idx(0, r0 + r, c0 + c)] = tl;
        m.dontcare[tl] = 0;
    }
    return m;
}

DataMap make_mvz_shell(const DataMap& mode) {
    DataMap m(MapKind::Mvz, 2, mode.rows, mode.cols, 1);
    for (int p = 0; p < 2; ++p)
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                const bool coded = !mode.masked(0, r, c) &&
                                   mode.value(0, r, c) == static_cast<int>(PredictionMode::InterM);
                m.dontcare[m.idx(p, r, c)] = coded ? 0 : 1;
            }
    return m;
}

DataMap make_residual_shell(const DataMap& mode, const std::vector<CuRect>& leaves, int width,
                            int height, const QuantConfig& quant) {
    DataMap m(MapKind::Residual, 1, height, width, 0);
    m.quant_step = quant.q;
    for (const auto& rect : leaves) {
        if (mode_at(mode, rect) != static_cast<int>(PredictionMode::Skip)) continue;
        for (int r = 0; r < rect.size; ++r) {
            const size_t base = m.idx(0, rect.row + r, rect.col);
            std::fill_n(m.dontcare.begin() + base, rect.size, uint8_t{1});
        }
    }
    return m;
}

}  // namespace btbd
