#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "btbd/frame.hpp"

namespace btbd {

/**
 * Analytic MSE of quantising a two-sided-geometric residual source with odd
 * step q = 2D+1, where p is the probability of a zero residual:
 *
 *   MSE = 2p * sum_{k=1..D} k^2 * sum_{i>=0} theta^(i(2D+1)+(-1)^i k),
 *   theta = (1-p)/(1+p),
 *
 * inner sums truncated once a term drops below 1e-12 of the running total.
 */
double tsg_mse(double p, int q);

/** PSNR in dB for an 8-bit peak; +infinity when mse == 0. */
double psnr_from_mse(double mse);

/** One rate/distortion measurement. */
struct RdPoint {
    double bpp = 0;
    double psnr = 0;
};

struct BdResult {
    double bd_rate_percent = 0;  // negative = curve b spends fewer bits
    double bd_psnr_db = 0;       // positive = curve b is better
};

/**
 * Bjontegaard deltas between two R-D curves: least-squares cubic fits of PSNR
 * over log10(rate) (and of log10(rate) over PSNR for the rate delta),
 * integrated over the curves' common range. Needs >= 4 points per curve and a
 * non-empty overlap.
 */
BdResult bd_metrics(const std::vector<RdPoint>& curve_a, const std::vector<RdPoint>& curve_b);

/** Aggregate coding statistics over the original (unpadded) region. */
struct SequenceStats {
    double bpp = 0;
    double compression_ratio = 0;  // 8 / bpp
    double psnr = 0;               // +infinity for exact reconstruction
    double zero_proportion = -1;   // rank-0 share of coded residual cells; -1 = unknown
};

SequenceStats sequence_stats(const Sequence& original, const Sequence& decoded,
                             uint64_t coded_bits, uint64_t zero_rank_cells = 0,
                             uint64_t coded_rank_cells = 0);

/** CSV with header "bpp,psnr", one point per line. */
std::vector<RdPoint> read_rd_csv(const std::string& path);
void write_rd_csv(const std::string& path, const std::vector<RdPoint>& points);

}  // namespace btbd
