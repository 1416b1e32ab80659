#pragma once

#include <cstdint>
#include <vector>

#include "btbd/common.hpp"

namespace btbd {

/** MSB-first bit writer backed by a growable byte buffer. */
class BitSink {
  public:
    void write_bit(int bit) {
        if (bit_pos_ == 0) buf_.push_back(0);
        if (bit) buf_.back() |= static_cast<uint8_t>(0x80u >> bit_pos_);
        bit_pos_ = (bit_pos_ + 1) & 7;
    }

    /** Writes the low `count` bits of `value`, most significant first. */
    void write_bits(uint64_t value, int count) {
        for (int i = count - 1; i >= 0; --i) write_bit(static_cast<int>((value >> i) & 1u));
    }

    void write_byte(uint8_t byte) { write_bits(byte, 8); }

    /** Pads with zero bits up to the next byte boundary. */
    void align_to_byte() {
        if (bit_pos_ != 0) {
            bit_pos_ = 0;
        }
    }

    uint64_t size_bits() const { return buf_.size() * 8ull - (bit_pos_ ? 8 - bit_pos_ : 0); }

    const std::vector<uint8_t>& bytes() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<uint8_t> buf_;
    int bit_pos_ = 0;  // bits already used in buf_.back(); 0 means byte-aligned
};

/** MSB-first bit reader; running past the end raises DecodeError. */
class BitSource {
  public:
    BitSource(const uint8_t* data, size_t size) : data_(data), size_(size) {}
    explicit BitSource(const std::vector<uint8_t>& data) : BitSource(data.data(), data.size()) {}

    int read_bit() {
        if (byte_pos_ >= size_) throw DecodeError("bitstream truncated");
        const int bit = (data_[byte_pos_] >> (7 - bit_pos_)) & 1;
        if (++bit_pos_ == 8) {
            bit_pos_ = 0;
            ++byte_pos_;
        }
        return bit;
    }

    uint64_t read_bits(int count) {
        uint64_t v = 0;
        for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<uint64_t>(read_bit());
        return v;
    }

    uint8_t read_byte() { return static_cast<uint8_t>(read_bits(8)); }

    void align_to_byte() {
        if (bit_pos_ != 0) {
            bit_pos_ = 0;
            ++byte_pos_;
        }
    }

    uint64_t position_bits() const { return byte_pos_ * 8ull + bit_pos_; }
    bool exhausted() const { return byte_pos_ >= size_; }

  private:
    const uint8_t* data_;
    size_t size_;
    size_t byte_pos_ = 0;
    int bit_pos_ = 0;
};

}  // namespace btbd
