#include "btbd/prediction.hpp"

#include <array>
#include <cstdlib>

namespace btbd {

namespace {

struct Neighbor {
    bool ok = false;
    int v = 0;
};

}  // namespace

int gap_predict(const ReconBuffer& recon, int row, int col,
                const uint8_t* overlay, const CuRect* overlay_rect) {
    auto fetch = [&](int r, int c) -> Neighbor {
        if (overlay_rect != nullptr && r >= overlay_rect->row && c >= overlay_rect->col &&
            r < overlay_rect->row + overlay_rect->size && c < overlay_rect->col + overlay_rect->size) {
            // Inside the CU under simulation: visible only if causally earlier.
            if (r < row || (r == row && c < col)) {
                const int lr = r - overlay_rect->row, lc = c - overlay_rect->col;
                return {true, overlay[lr * overlay_rect->size + lc]};
            }
            return {};
        }
        if (recon.has(r, c)) return {true, recon.value(r, c)};
        return {};
    };

    const Neighbor W = fetch(row, col - 1), N = fetch(row - 1, col);
    if (!W.ok && !N.ok) return 128;
    const Neighbor NW = fetch(row - 1, col - 1), NE = fetch(row - 1, col + 1);
    const Neighbor WW = fetch(row, col - 2), NN = fetch(row - 2, col);
    const Neighbor NNE = fetch(row - 2, col + 1);

    const int w = W.ok ? W.v : N.v;
    const int n = N.ok ? N.v : w;
    const int nw = NW.ok ? NW.v : n;
    const int ne = NE.ok ? NE.v : n;
    const int ww = WW.ok ? WW.v : w;
    const int nn = NN.ok ? NN.v : n;
    const int nne = NNE.ok ? NNE.v : ne;

    const int dh = std::abs(w - ww) + std::abs(n - nw) + std::abs(n - ne);
    const int dv = std::abs(w - nw) + std::abs(n - nn) + std::abs(ne - nne);
    const int d = dv - dh;

    int pred;
    if (d > 80) {
        pred = w;
    } else if (d < -80) {
        pred = n;
    } else {
        pred = ((w + n) >> 1) + ((ne - nw) >> 2);
        if (d > 32)
            pred = (pred + w) >> 1;
        else if (d > 8)
            pred = (3 * pred + w) >> 2;
        else if (d < -32)
            pred = (pred + n) >> 1;
        else if (d < -8)
            pred = (3 * pred + n) >> 2;
    }
    return clamp_sample(pred);
}

uint64_t block_sad(const DepthFrame& cur, const DepthFrame& ref, const CuRect& rect,
                   const MotionVector& mv) {
    uint64_t sad = 0;
    for (int r = 0; r < rect.size; ++r) {
        const uint8_t* a = cur.samples.data() + static_cast<size_t>(rect.row + r) * cur.width + rect.col;
        const uint8_t* b = ref.samples.data() +
                           static_cast<size_t>(rect.row + mv.y + r) * ref.width + rect.col + mv.x;
        for (int c = 0; c < rect.size; ++c) sad += static_cast<uint64_t>(std::abs(int(a[c]) - int(b[c])));
    }
    return sad;
}

namespace {

bool mv_legal(const DepthFrame& ref, const CuRect& rect, int x, int y, int range) {
    if (x < -range || x > range || y < -range || y > range) return false;
    if (rect.col + x < 0 || rect.row + y < 0) return false;
    if (rect.col + x + rect.size > ref.width || rect.row + y + rect.size > ref.height) return false;
    return true;
}

struct Best {
    MotionVector mv;
    uint64_t sad = ~0ull;

    bool improve(const MotionVector& cand, uint64_t cand_sad) {
        const int cm = std::abs(cand.x) + std::abs(cand.y);
        const int bm = std::abs(mv.x) + std::abs(mv.y);
        if (cand_sad < sad || (cand_sad == sad && (cm < bm || (cm == bm && (cand.y < mv.y ||
                               (cand.y == mv.y && cand.x < mv.x)))))) {
            mv = cand;
            sad = cand_sad;
            return true;
        }
        return false;
    }
};

}  // namespace

MotionResult diamond_search(const DepthFrame& cur, const DepthFrame& ref, const CuRect& rect,
                            int search_range) {
    static constexpr std::array<std::pair<int, int>, 8> kLarge = {
        {{0, -2}, {0, 2}, {-2, 0}, {2, 0}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
    static constexpr std::array<std::pair<int, int>, 4> kSmall = {
        {{0, -1}, {0, 1}, {-1, 0}, {1, 0}}};

    Best best;
    best.mv = {0, 0};
    best.sad = block_sad(cur, ref, rect, best.mv);

    // Large diamond walks until the centre stays put, then one small-diamond pass.
    for (int iter = 0; iter < 4 * search_range + 4; ++iter) {
        const MotionVector centre = best.mv;
        for (const auto& [dy, dx] : kLarge) {
            const MotionVector cand{centre.x + dx, centre.y + dy};
            if (!mv_legal(ref, rect, cand.x, cand.y, search_range)) continue;
            best.improve(cand, block_sad(cur, ref, rect, cand));
        }
        if (best.mv == centre) break;
    }
    const MotionVector centre = best.mv;
    for (const auto& [dy, dx] : kSmall) {
        const MotionVector cand{centre.x + dx, centre.y + dy};
        if (!mv_legal(ref, rect, cand.x, cand.y, search_range)) continue;
        best.improve(cand, block_sad(cur, ref, rect, cand));
    }
    return {best.mv, best.sad};
}

}  // namespace btbd
