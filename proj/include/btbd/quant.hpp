#pragma once

#include <string>

#include "btbd/common.hpp"

namespace btbd {

/** Odd quantisation step q = 2D+1; D is the per-sample error bound. */
struct QuantConfig {
    int q = 1;

    explicit QuantConfig(int step) : q(step) {
        if (step < 1 || step > 255 || step % 2 == 0)
            throw InputError("quantisation step must be odd and in [1,255], got " +
                             std::to_string(step));
    }

    int bound() const { return (q - 1) / 2; }            // max |error| after dequantisation
    int range_bound() const { return round_div(255, q); }  // nominal rank alphabet bound
};

/** eps -> nearest multiple index, ties away from zero: |eps - q*quantize(eps)| <= (q-1)/2. */
inline int quantize(int eps, const QuantConfig& cfg) { return round_div(eps, cfg.q); }

inline int dequantize(int eps_q, const QuantConfig& cfg) { return eps_q * cfg.q; }

/**
 * Rank of eps_q within the signed value set {-pred_q, ..., bound - pred_q}:
 * magnitudes interleave (- before + at equal magnitude) while both signs
 * remain, then the surviving sign continues linearly. Bijection onto [0, bound].
 */
inline int rank_map(int eps_q, int pred_q, int bound) {
    if (eps_q < -pred_q || eps_q > bound - pred_q)
        throw InputError("residual outside representable set");
    const int mn = pred_q < bound - pred_q ? pred_q : bound - pred_q;
    const int mag = eps_q < 0 ? -eps_q : eps_q;
    if (mag <= mn) return eps_q >= 0 ? 2 * eps_q : -2 * eps_q - 1;
    return mn + mag;
}

inline int rank_unmap(int rank, int pred_q, int bound) {
    if (rank < 0 || rank > bound) throw InputError("rank outside alphabet");
    const int mn = pred_q < bound - pred_q ? pred_q : bound - pred_q;
    if (rank <= 2 * mn) return (rank % 2 == 0) ? rank / 2 : -(rank + 1) / 2;
    const int mag = rank - mn;
    return pred_q <= bound - pred_q ? mag : -mag;
}

}  // namespace btbd
