#include "btbd/mv_codec.hpp"

#include <algorithm>
#include <array>

#include "btbd/exp_golomb.hpp"
#include "btbd/range_coder.hpp"

namespace btbd {

namespace {

// Owner lookup on the 8-pixel cell grid: cell -> record index, -1 when no
// motion-compensated CU covers it.
std::vector<int32_t> build_owner_grid(const std::vector<MvRecord>& cus, int frame_width,
                                      int frame_height) {
    const int cols = frame_width / kMinCuSize;
    const int rows = frame_height / kMinCuSize;
    std::vector<int32_t> owner(static_cast<size_t>(rows) * cols, -1);
    for (size_t i = 0; i < cus.size(); ++i) {
        const CuRect& r = cus[i].rect;
        const int c0 = r.col / kMinCuSize, r0 = r.row / kMinCuSize, n = r.size / kMinCuSize;
        for (int dr = 0; dr < n; ++dr)
            for (int dc = 0; dc < n; ++dc)
                owner[static_cast<size_t>(r0 + dr) * cols + (c0 + dc)] = static_cast<int32_t>(i);
    }
    return owner;
}

std::array<int32_t, 3> neighbour_indices(const std::vector<int32_t>& owner, int cols, int rows,
                                         const CuRect& rect) {
    const int c0 = rect.col / kMinCuSize, r0 = rect.row / kMinCuSize, n = rect.size / kMinCuSize;
    auto at = [&](int r, int c) -> int32_t {
        if (r < 0 || c < 0 || r >= rows || c >= cols) return -1;
        return owner[static_cast<size_t>(r) * cols + c];
    };
    return {at(r0, c0 - 1), at(r0 - 1, c0), at(r0 - 1, c0 + n)};
}

int median_component(std::array<int, 3>& vals, int count) {
    if (count == 0) return 0;
    if (count == 1) return vals[0];
    if (count == 2) return round_div(vals[0] + vals[1], 2);
    std::sort(vals.begin(), vals.begin() + 3);
    return vals[1];
}

void validate_records(const std::vector<MvRecord>& cus, int frame_width, int frame_height,
                      int search_range, bool check_values) {
    for (size_t i = 0; i < cus.size(); ++i) {
        const auto& cu = cus[i];
        if (cu.rect.col < 0 || cu.rect.row < 0 || cu.rect.size < kMinCuSize ||
            cu.rect.col + cu.rect.size > frame_width ||
            cu.rect.row + cu.rect.size > frame_height ||
            cu.rect.col % kMinCuSize != 0 || cu.rect.row % kMinCuSize != 0 ||
            cu.rect.size % kMinCuSize != 0)
            throw InputError("motion record rect out of bounds");
        if (i > 0 && (cus[i].rect.row < cus[i - 1].rect.row ||
                      (cus[i].rect.row == cus[i - 1].rect.row &&
                       cus[i].rect.col <= cus[i - 1].rect.col)))
            throw InputError("motion records not in row-major order");
        if (check_values) {
            if ((cu.coded_x && cu.mv.x == 0) || (cu.coded_y && cu.mv.y == 0))
                throw InputError("zero component flagged for coding");
            if ((!cu.coded_x && cu.mv.x != 0) || (!cu.coded_y && cu.mv.y != 0))
                throw InputError("nonzero component not flagged for coding");
            if (std::abs(cu.mv.x) > search_range || std::abs(cu.mv.y) > search_range)
                throw InputError("motion component beyond search range");
        }
    }
}

struct FieldView {
    const std::vector<int32_t>& owner;
    int cols, rows;
};

int predict_component(const std::vector<MvRecord>& cus, const FieldView& view, size_t index,
                      bool y_component) {
    const auto nbr = neighbour_indices(view.owner, view.cols, view.rows, cus[index].rect);
    std::array<int, 3> vals{};
    int count = 0;
    for (int32_t j : nbr)
        if (j >= 0) {
            const MotionVector& m = cus[static_cast<size_t>(j)].mv;
            vals[count++] = y_component ? m.y : m.x;
        }
    return median_component(vals, count);
}

// Applies fn(index, y_component) to every flagged component, x plane then y.
template <typename Fn>
void for_each_coded(const std::vector<MvRecord>& cus, Fn&& fn) {
    for (size_t i = 0; i < cus.size(); ++i)
        if (cus[i].coded_x) fn(i, false);
    for (size_t i = 0; i < cus.size(); ++i)
        if (cus[i].coded_y) fn(i, true);
}

std::vector<int> coded_values(const std::vector<MvRecord>& cus) {
    std::vector<int> vals;
    for_each_coded(cus, [&](size_t i, bool yc) { vals.push_back(yc ? cus[i].mv.y : cus[i].mv.x); });
    return vals;
}

std::vector<int> coded_differences(const std::vector<MvRecord>& cus, const FieldView& view) {
    std::vector<int> diffs;
    for_each_coded(cus, [&](size_t i, bool yc) {
        const int v = yc ? cus[i].mv.y : cus[i].mv.x;
        diffs.push_back(v - predict_component(cus, view, i, yc));
    });
    return diffs;
}

void encode_predicted_arith(const std::vector<int>& diffs, int search_range, BitSink& sink) {
    int peak = 1;
    for (int d : diffs) peak = std::max(peak, std::abs(d));
    sink.write_bits(static_cast<uint64_t>(peak - 1), ceil_log2(2 * search_range));
    AdaptiveModel model({static_cast<uint32_t>(2 * peak + 1)});
    RangeEncoder enc(sink);
    for (int d : diffs) model.encode(enc, 0, static_cast<uint32_t>(d + peak));
    enc.flush();
}

void encode_direct_arith(const std::vector<int>& vals, int search_range, BitSink& sink) {
    int peak = 1;
    for (int v : vals) peak = std::max(peak, std::abs(v));
    sink.write_bits(static_cast<uint64_t>(peak - 1), ceil_log2(search_range));
    AdaptiveModel model({static_cast<uint32_t>(2 * peak)});
    RangeEncoder enc(sink);
    for (int v : vals)
        model.encode(enc, 0, static_cast<uint32_t>(v < 0 ? v + peak : peak + v - 1));
    enc.flush();
}

void encode_payload(const std::vector<MvRecord>& cus, const FieldView& view, MvCodingMode mode,
                    int search_range, BitSink& sink) {
    switch (mode) {
        case MvCodingMode::PredictedGolomb:
            for (int d : coded_differences(cus, view)) eg_encode_signed(sink, d);
            break;
        case MvCodingMode::PredictedArithmetic:
            encode_predicted_arith(coded_differences(cus, view), search_range, sink);
            break;
        case MvCodingMode::DirectGolomb:
            meg_encode(sink, coded_values(cus));
            break;
        case MvCodingMode::DirectArithmetic:
            encode_direct_arith(coded_values(cus), search_range, sink);
            break;
    }
}

void assign_component(MvRecord& cu, bool y_component, int v, int search_range) {
    if (v == 0 || std::abs(v) > search_range)
        throw DecodeError("motion component out of range");
    (y_component ? cu.mv.y : cu.mv.x) = v;
}

}  // namespace

MotionVector predicted_mv(const std::vector<MvRecord>& cus, int frame_width, int frame_height,
                          size_t index) {
    validate_records(cus, frame_width, frame_height, 0, false);
    const auto owner = build_owner_grid(cus, frame_width, frame_height);
    const FieldView view{owner, frame_width / kMinCuSize, frame_height / kMinCuSize};
    return {predict_component(cus, view, index, false),
            predict_component(cus, view, index, true)};
}

MvEncodeInfo encode_mv_field(const std::vector<MvRecord>& cus, int frame_width, int frame_height,
                             int search_range, BitSink& sink) {
    MvEncodeInfo info;
    if (cus.empty()) return info;
    validate_records(cus, frame_width, frame_height, search_range, true);
    info.signalled = true;

    const auto owner = build_owner_grid(cus, frame_width, frame_height);
    const FieldView view{owner, frame_width / kMinCuSize, frame_height / kMinCuSize};

    for (int m = 0; m < 4; ++m) {
        BitSink trial;
        encode_payload(cus, view, static_cast<MvCodingMode>(m), search_range, trial);
        info.candidate_bits[m] = trial.size_bits();
        if (m == 0 || info.candidate_bits[m] < info.payload_bits) {
            info.chosen = static_cast<MvCodingMode>(m);
            info.payload_bits = info.candidate_bits[m];
        }
    }

    sink.write_bits(static_cast<uint64_t>(info.chosen), 2);
    encode_payload(cus, view, info.chosen, search_range, sink);
    return info;
}

void decode_mv_field(std::vector<MvRecord>& cus, int frame_width, int frame_height,
                     int search_range, BitSource& src) {
    if (cus.empty()) return;
    validate_records(cus, frame_width, frame_height, search_range, false);
    const auto owner = build_owner_grid(cus, frame_width, frame_height);
    const FieldView view{owner, frame_width / kMinCuSize, frame_height / kMinCuSize};

    const auto mode = static_cast<MvCodingMode>(src.read_bits(2));
    switch (mode) {
        case MvCodingMode::PredictedGolomb:
            for_each_coded(cus, [&](size_t i, bool yc) {
                const int pred = predict_component(cus, view, i, yc);
                const int64_t d = eg_decode_signed(src);
                assign_component(cus[i], yc, pred + static_cast<int>(d), search_range);
            });
            break;
        case MvCodingMode::PredictedArithmetic: {
            const int peak = static_cast<int>(src.read_bits(ceil_log2(2 * search_range))) + 1;
            if (peak > 2 * search_range) throw DecodeError("difference peak beyond range");
            AdaptiveModel model({static_cast<uint32_t>(2 * peak + 1)});
            RangeDecoder dec(src);
            for_each_coded(cus, [&](size_t i, bool yc) {
                const int pred = predict_component(cus, view, i, yc);
                const int d = static_cast<int>(model.decode(dec, 0)) - peak;
                assign_component(cus[i], yc, pred + d, search_range);
            });
            break;
        }
        case MvCodingMode::DirectGolomb: {
            size_t count = 0;
            for_each_coded(cus, [&](size_t, bool) { ++count; });
            const auto vals = meg_decode(src, count);
            size_t k = 0;
            for_each_coded(cus,
                           [&](size_t i, bool yc) { assign_component(cus[i], yc, vals[k++], search_range); });
            break;
        }
        case MvCodingMode::DirectArithmetic: {
            const int peak = static_cast<int>(src.read_bits(ceil_log2(search_range))) + 1;
            if (peak > search_range) throw DecodeError("component peak beyond range");
            AdaptiveModel model({static_cast<uint32_t>(2 * peak)});
            RangeDecoder dec(src);
            for_each_coded(cus, [&](size_t i, bool yc) {
                const int s = static_cast<int>(model.decode(dec, 0));
                const int v = s < peak ? s - peak : s - peak + 1;
                assign_component(cus[i], yc, v, search_range);
            });
            break;
        }
    }
}

}  // namespace btbd
