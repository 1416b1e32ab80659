#include "btbd/data_map.hpp"

namespace btbd {

namespace internal {

int neighbor_contribution(const DataMap& map, int p, int y, int x,
                          const std::vector<uint8_t>* known) {
    if (p < 0 || y < 0 || x < 0) return 0;
    const size_t i = map.idx(p, y, x);
    if (map.dontcare[i]) {
        if (map.kind == MapKind::Mode && !map.cover_cell.empty()) {
            const int32_t t = map.cover_cell[i];
            if (t >= 0 && (known == nullptr || (*known)[t])) return map.symbols[t];
        }
        return 0;  // skipped cells carry no signal (skip CUs have zero residual)
    }
    if (known != nullptr && !(*known)[i]) return 0;
    const int v = map.symbols[i];
    if (map.kind == MapKind::Residual) return residual_neighbor_magnitude(v, map.quant_step);
    return v;
}

int context_with_visibility(const DataMap& map, int p, int y, int x,
                            const std::vector<uint8_t>* known) {
    const ContextModelInfo info = context_model(map.kind);
    const int ax = neighbor_contribution(map, p, y, x - 1, known);
    const int ay = neighbor_contribution(map, p, y - 1, x, known);
    if (info.ordinal) return residual_context_bin(ax + ay);
    int ctx = ax + info.arity * ay;
    if (map.planes > 1) ctx += info.arity * info.arity * neighbor_contribution(map, p - 1, y, x, known);
    return ctx;
}

}  // namespace internal

int context_of(const DataMap& map, int p, int y, int x) {
    return internal::context_with_visibility(map, p, y, x, nullptr);
}

}  // namespace btbd
