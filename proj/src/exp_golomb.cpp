#include "btbd/exp_golomb.hpp"

namespace btbd {

void meg_encode(BitSink& sink, const std::vector<int>& values) {
    size_t positive = 0;
    for (int v : values)
        if (v > 0) ++positive;
    const bool majority_positive = positive * 2 >= values.size();
    sink.write_bit(majority_positive ? 1 : 0);
    for (int v : values) {
        int shifted;
        if (majority_positive)
            shifted = v > 0 ? v - 1 : v;
        else
            shifted = v < 0 ? v + 1 : v;
        eg_encode_signed(sink, shifted);
    }
}

std::vector<int> meg_decode(BitSource& src, size_t count) {
    const bool majority_positive = src.read_bit() != 0;
    std::vector<int> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const int64_t w = eg_decode_signed(src);
        int v;
        if (majority_positive)
            v = w >= 0 ? static_cast<int>(w) + 1 : static_cast<int>(w);
        else
            v = w <= 0 ? static_cast<int>(w) - 1 : static_cast<int>(w);
        out.push_back(v);
    }
    return out;
}

}  // namespace btbd
