#pragma once

#include <cstdint>
#include <vector>

#include "btbd/data_map.hpp"

namespace btbd {

/**
 * Method-of-moments estimate of the geometric skew parameter from a context
 * histogram over [0, R]; 1.0 when all mass sits at symbol 0 (degenerate
 * denominator), clamped into (0, 1].
 */
double estimate_p_hat(int64_t n_total, int64_t sum_j, int64_t sum_j2, int alphabet_bound);

/**
 * Static-model side-information cost of one context with n_i occurrences:
 * (R_hat/2) * log2(n_i), where R_hat corrects the free-parameter count from
 * the skew estimate and is clamped to [1, R]. Bitmaps (R == 1) use
 * (1/2) * log2(n_i) with no correction. Requires n_i >= 2.
 */
double model_cost(int64_t n_i, int alphabet_bound, double p_hat);

/** Reusable scratch for estimate_code_length; epoch-stamped to avoid clears. */
class EstimatorScratch {
  public:
    void prepare(size_t slots);
    uint32_t* counts() { return counts_.data(); }
    uint32_t* stamps() { return stamps_.data(); }
    uint32_t epoch() const { return epoch_; }
    std::vector<uint32_t>& touched() { return touched_; }

  private:
    std::vector<uint32_t> counts_;
    std::vector<uint32_t> stamps_;
    std::vector<uint32_t> touched_;
    uint32_t epoch_ = 0;
};

/**
 * Estimated adaptive-arithmetic code length of a region in whole bits:
 * ceil( sum_i n_i * H0(context i) + model_cost(i) ), skipping don't-care
 * cells. Contexts with fewer than two occurrences contribute nothing, and a
 * region holding at most one distinct symbol costs 0 (it would be signalled
 * structurally). `use_context` false collapses everything into one context.
 */
uint64_t estimate_code_length(const DataMap& map, const Region& region,
                              EstimatorScratch& scratch, bool use_context = true);

/** Convenience overload with private scratch. */
uint64_t estimate_code_length(const DataMap& map, const Region& region, bool use_context = true);

}  // namespace btbd
