#include "btbd/code_length.hpp"

#include <algorithm>
#include <cmath>

namespace btbd {

double estimate_p_hat(int64_t n_total, int64_t sum_j, int64_t sum_j2, int alphabet_bound) {
    const int64_t r = alphabet_bound;
    const int64_t den = (r + 1) * sum_j - sum_j2;
    if (den == 0) return 1.0;  // every observation is symbol 0
    const double p = static_cast<double>((r + 2) * n_total - 2 * sum_j) / static_cast<double>(den);
    if (p > 1.0) return 1.0;
    if (p < 1e-12) return 1e-12;
    return p;
}

double model_cost(int64_t n_i, int alphabet_bound, double p_hat) {
    const double log_n = std::log2(static_cast<double>(n_i));
    if (alphabet_bound <= 1) return 0.5 * log_n;
    const double r = alphabet_bound;
    const double threshold = std::exp2((1.0 - std::log2(r + 1.0)) / 2.0);
    const double exponent = ((r + 1.0) / log_n) * (threshold - p_hat);
    double r_hat = r / std::exp2(exponent);
    if (r_hat < 1.0) r_hat = 1.0;
    if (r_hat > r) r_hat = r;
    return (r_hat / 2.0) * log_n;
}

void EstimatorScratch::prepare(size_t slots) {
    if (counts_.size() < slots) {
        counts_.assign(slots, 0);
        stamps_.assign(slots, 0);
        epoch_ = 0;
    }
    ++epoch_;
    if (epoch_ == 0) {  // stamp wrap: invalidate everything once
        std::fill(stamps_.begin(), stamps_.end(), 0);
        epoch_ = 1;
    }
    touched_.clear();
}

uint64_t estimate_code_length(const DataMap& map, const Region& region,
                              EstimatorScratch& scratch, bool use_context) {
    const ContextModelInfo info = context_model(map.kind);
    const int k = use_context ? info.context_count : 1;
    const int width = map.alphabet_bound + 1;
    scratch.prepare(static_cast<size_t>(k) * width);
    uint32_t* counts = scratch.counts();
    uint32_t* stamps = scratch.stamps();
    const uint32_t epoch = scratch.epoch();
    auto& touched = scratch.touched();

    int64_t n_i[17] = {0};
    int64_t sum_j[17] = {0};
    int64_t sum_j2[17] = {0};
    int first_symbol = -1;
    bool multi_symbol = false;
    int64_t total = 0;

    for (int p = region.p0; p < region.p1; ++p)
        for (int y = region.y0; y < region.y1; ++y) {
            const size_t row_base = map.idx(p, y, 0);
            for (int x = region.x0; x < region.x1; ++x) {
                if (map.dontcare[row_base + x]) continue;
                const int v = map.symbols[row_base + x];
                if (first_symbol < 0)
                    first_symbol = v;
                else if (v != first_symbol)
                    multi_symbol = true;
                const int ctx = use_context ? context_of(map, p, y, x) : 0;
                const size_t slot = static_cast<size_t>(ctx) * width + v;
                if (stamps[slot] != epoch) {
                    stamps[slot] = epoch;
                    counts[slot] = 0;
                    touched.push_back(static_cast<uint32_t>(slot));
                }
                ++counts[slot];
                ++n_i[ctx];
                sum_j[ctx] += v;
                sum_j2[ctx] += static_cast<int64_t>(v) * v;
                ++total;
            }
        }

    if (total == 0 || !multi_symbol) return 0;

    // sum_i n_i*H0(i) = sum_i [ n_i*log2(n_i) - sum_j c_ij*log2(c_ij) ]
    double bits = 0.0;
    for (uint32_t slot : touched) {
        const double c = counts[slot];
        bits -= c * std::log2(c);
    }
    for (int i = 0; i < k; ++i) {
        if (n_i[i] < 2) continue;
        bits += static_cast<double>(n_i[i]) * std::log2(static_cast<double>(n_i[i]));
        const double p_hat = estimate_p_hat(n_i[i], sum_j[i], sum_j2[i], map.alphabet_bound);
        bits += model_cost(n_i[i], map.alphabet_bound, p_hat);
    }
    if (bits < 0) bits = 0;
    return static_cast<uint64_t>(std::ceil(bits));
}

uint64_t estimate_code_length(const DataMap& map, const Region& region, bool use_context) {
    EstimatorScratch scratch;
    return estimate_code_length(map, region, scratch, use_context);
}

}  // namespace btbd
