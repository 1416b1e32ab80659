#pragma once

#include <cstdint>
#include <vector>

#include "btbd/bitio.hpp"
#include "btbd/common.hpp"

namespace btbd {

/**
 * Carry-less binary-carry range coder, 32-bit low/range registers with
 * byte-wise renormalisation. Encoder and decoder consume/produce exactly the
 * same number of bytes for the same symbol sequence (4-byte flush == 4-byte
 * prime), so streams embed back-to-back without explicit length fields.
 */
class RangeEncoder {
  public:
    explicit RangeEncoder(BitSink& sink) : sink_(sink) {}

    void encode(uint32_t cum, uint32_t freq, uint32_t total) {
        range_ /= total;
        low_ += cum * range_;
        range_ *= freq;
        normalize();
    }

    void flush() {
        for (int i = 0; i < 4; ++i) {
            sink_.write_byte(static_cast<uint8_t>(low_ >> 24));
            low_ <<= 8;
        }
    }

  private:
    void normalize() {
        while ((low_ ^ (low_ + range_)) < kTop ||
               (range_ < kBottom && ((range_ = -low_ & (kBottom - 1)), true))) {
            sink_.write_byte(static_cast<uint8_t>(low_ >> 24));
            low_ <<= 8;
            range_ <<= 8;
        }
    }

    static constexpr uint32_t kTop = 1u << 24;
    static constexpr uint32_t kBottom = 1u << 16;
    BitSink& sink_;
    uint32_t low_ = 0;
    uint32_t range_ = 0xFFFFFFFFu;
};

class RangeDecoder {
  public:
    explicit RangeDecoder(BitSource& src) : src_(src) {
        for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | src_.read_byte();
    }

    /** Returns a value in [0, total); caller maps it to a symbol interval. */
    uint32_t decode_target(uint32_t total) {
        range_ /= total;
        const uint32_t target = (code_ - low_) / range_;
        if (target >= total) throw DecodeError("arithmetic decoder desynchronised");
        return target;
    }

    void decode_update(uint32_t cum, uint32_t freq) {
        low_ += cum * range_;
        range_ *= freq;
        while ((low_ ^ (low_ + range_)) < kTop ||
               (range_ < kBottom && ((range_ = -low_ & (kBottom - 1)), true))) {
            code_ = (code_ << 8) | src_.read_byte();
            low_ <<= 8;
            range_ <<= 8;
        }
    }

  private:
    static constexpr uint32_t kTop = 1u << 24;
    static constexpr uint32_t kBottom = 1u << 16;
    BitSource& src_;
    uint32_t low_ = 0;
    uint32_t range_ = 0xFFFFFFFFu;
    uint32_t code_ = 0;
};

/**
 * Per-context adaptive frequency tables: add-one (Laplace) initial counts,
 * +1 per coded symbol, all counts halved (floor at 1) whenever a context's
 * total reaches 2^13. Encoder and decoder evolve identical tables.
 */
class AdaptiveModel {
  public:
    /** One table per context; alphabet_sizes[i] symbols in context i. */
    explicit AdaptiveModel(const std::vector<uint32_t>& alphabet_sizes) {
        tables_.reserve(alphabet_sizes.size());
        totals_.reserve(alphabet_sizes.size());
        for (uint32_t n : alphabet_sizes) {
            tables_.emplace_back(n, 1u);
            totals_.push_back(n);
        }
    }

    uint32_t context_count() const { return static_cast<uint32_t>(tables_.size()); }
    uint32_t alphabet_size(uint32_t ctx) const { return static_cast<uint32_t>(tables_[ctx].size()); }

    void encode(RangeEncoder& enc, uint32_t ctx, uint32_t symbol) {
        auto& f = tables_[ctx];
        if (f.size() <= 1) return;  // degenerate alphabet carries no information
        uint32_t cum = 0;
        for (uint32_t j = 0; j < symbol; ++j) cum += f[j];
        enc.encode(cum, f[symbol], totals_[ctx]);
        bump(ctx, symbol);
    }

    uint32_t decode(RangeDecoder& dec, uint32_t ctx) {
        auto& f = tables_[ctx];
        if (f.size() <= 1) return 0;
        const uint32_t target = dec.decode_target(totals_[ctx]);
        uint32_t cum = 0, symbol = 0;
        while (cum + f[symbol] <= target) cum += f[symbol++];
        dec.decode_update(cum, f[symbol]);
        bump(ctx, symbol);
        return symbol;
    }

    /** Fingerprint of all tables; used to assert encoder/decoder symmetry. */
    uint64_t state_hash() const {
        uint64_t h = 1469598103934665603ull;
        for (const auto& t : tables_)
            for (uint32_t f : t) {
                h ^= f;
                h *= 1099511628211ull;
            }
        return h;
    }

  private:
    void bump(uint32_t ctx, uint32_t symbol) {
        auto& f = tables_[ctx];
        f[symbol] += 1;
        totals_[ctx] += 1;
        if (totals_[ctx] >= kRescaleCap) {
            uint32_t total = 0;
            for (auto& v : f) {
                v = (v + 1) >> 1;
                total += v;
            }
            totals_[ctx] = total;
        }
    }

    static constexpr uint32_t kRescaleCap = 1u << 13;
    std::vector<std::vector<uint32_t>> tables_;
    std::vector<uint32_t> totals_;
};

}  // namespace btbd
