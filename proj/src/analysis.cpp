#include "btbd/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace btbd {

namespace {

constexpr double kRelativeTruncation = 1e-12;
constexpr int kMaxSeriesTerms = 1000000;

/** Least-squares cubic fit of y over x via the 4x4 normal equations. */
std::array<long double, 4> fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx[7] = {0};
    long double sy[4] = {0};
    for (size_t n = 0; n < x.size(); ++n) {
        long double pw = 1.0L;
        for (int k = 0; k <= 6; ++k, pw *= x[n]) {
            sx[k] += pw;
            if (k <= 3) sy[k] += y[n] * pw;
        }
    }
    long double m[4][5];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) m[r][c] = sx[r + c];
        m[r][4] = sy[r];
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(static_cast<double>(m[r][col])) >
                std::fabs(static_cast<double>(m[pivot][col])))
                pivot = r;
        if (m[pivot][col] == 0.0L) throw InputError("degenerate rate-distortion curve");
        if (pivot != col)
            for (int c = col; c <= 4; ++c) std::swap(m[pivot][c], m[col][c]);
        for (int r = col + 1; r < 4; ++r) {
            const long double f = m[r][col] / m[col][col];
            for (int c = col; c <= 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    std::array<long double, 4> coeff{};
    for (int r = 3; r >= 0; --r) {
        long double acc = m[r][4];
        for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * coeff[c];
        coeff[r] = acc / m[r][r];
    }
    return coeff;
}

long double integrate_cubic(const std::array<long double, 4>& c, double lo, double hi) {
    auto anti = [&](long double t) {
        return c[0] * t + c[1] * t * t / 2.0L + c[2] * t * t * t / 3.0L +
               c[3] * t * t * t * t / 4.0L;
    };
    return anti(hi) - anti(lo);
}

struct Axis {
    std::vector<double> x, y;
    double lo = 0, hi = 0;
};

double mean_curve_gap(const std::vector<double>& xa, const std::vector<double>& ya,
                      const std::vector<double>& xb, const std::vector<double>& yb,
                      const char* overlap_error) {
    const auto ca = fit_cubic(xa, ya);
    const auto cb = fit_cubic(xb, yb);
    double lo = *std::min_element(xa.begin(), xa.end());
    double hi = *std::max_element(xa.begin(), xa.end());
    lo = std::max(lo, *std::min_element(xb.begin(), xb.end()));
    hi = std::min(hi, *std::max_element(xb.begin(), xb.end()));
    if (!(hi > lo)) throw InputError(overlap_error);
    return static_cast<double>((integrate_cubic(cb, lo, hi) - integrate_cubic(ca, lo, hi)) /
                               (hi - lo));
}

}  // namespace

double tsg_mse(double p, int q) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("zero proportion must lie in (0,1)");
    if (q < 3 || q % 2 == 0) throw InputError("step must be odd and at least 3");
    const int d = (q - 1) / 2;
    const double theta = (1.0 - p) / (1.0 + p);
    double acc = 0.0;
    for (int k = 1; k <= d; ++k) {
        double inner = 0.0;
        for (int i = 0; i < kMaxSeriesTerms; ++i) {
            const double exponent = static_cast<double>(i) * q + (i % 2 == 0 ? k : -k);
            const double term = std::pow(theta, exponent);
            if (inner > 0.0 && term < kRelativeTruncation * inner) break;
            inner += term;
        }
        acc += static_cast<double>(k) * k * inner;
    }
    return 2.0 * p * acc;
}

double psnr_from_mse(double mse) {
    if (mse <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

BdResult bd_metrics(const std::vector<RdPoint>& curve_a, const std::vector<RdPoint>& curve_b) {
    if (curve_a.size() < 4 || curve_b.size() < 4)
        throw InputError("each curve needs at least four points");
    auto split = [](const std::vector<RdPoint>& pts, std::vector<double>& rate,
                    std::vector<double>& quality) {
        for (const auto& pt : pts) {
            if (!(pt.bpp > 0.0)) throw InputError("bitrates must be positive");
            rate.push_back(std::log10(pt.bpp));
            quality.push_back(pt.psnr);
        }
    };
    std::vector<double> ra, qa, rb, qb;
    split(curve_a, ra, qa);
    split(curve_b, rb, qb);

    BdResult out;
    out.bd_psnr_db = mean_curve_gap(ra, qa, rb, qb, "curves do not overlap in rate");
    const double log_rate_gap =
        mean_curve_gap(qa, ra, qb, rb, "curves do not overlap in quality");
    out.bd_rate_percent = (std::pow(10.0, log_rate_gap) - 1.0) * 100.0;
    return out;
}

SequenceStats sequence_stats(const Sequence& original, const Sequence& decoded,
                             uint64_t coded_bits, uint64_t zero_rank_cells,
                             uint64_t coded_rank_cells) {
    if (original.frames.size() != decoded.frames.size() || original.frames.empty())
        throw InputError("sequences differ in frame count");
    if (original.original_width != decoded.original_width ||
        original.original_height != decoded.original_height)
        throw InputError("sequences differ in dimensions");
    SequenceStats s;
    const double pixels = static_cast<double>(original.original_width) *
                          original.original_height * original.frames.size();
    s.bpp = static_cast<double>(coded_bits) / pixels;
    s.compression_ratio =
        s.bpp > 0.0 ? 8.0 / s.bpp : std::numeric_limits<double>::infinity();
    s.psnr = sequence_psnr(original, decoded);
    if (coded_rank_cells > 0)
        s.zero_proportion =
            static_cast<double>(zero_rank_cells) / static_cast<double>(coded_rank_cells);
    return s;
}

std::vector<RdPoint> read_rd_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    std::string line;
    if (!std::getline(in, line) || trim(line) != "bpp,psnr")
        throw InputError(path + ": expected header 'bpp,psnr'");
    std::vector<RdPoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty()) continue;
        std::istringstream ss(body);
        RdPoint pt;
        char comma = 0;
        if (!(ss >> pt.bpp >> comma >> pt.psnr) || comma != ',')
            throw InputError(path + ": malformed point at line " + std::to_string(line_no));
        if (!(pt.bpp > 0.0))
            throw InputError(path + ": non-positive bitrate at line " + std::to_string(line_no));
        points.push_back(pt);
    }
    return points;
}

void write_rd_csv(const std::string& path, const std::vector<RdPoint>& points) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path);
    out << "bpp,psnr\n" << std::setprecision(10);
    for (const auto& pt : points) out << pt.bpp << ',' << pt.psnr << '\n';
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace btbd
