#include "btbd/stream.hpp"

#include <algorithm>

#include "btbd/rdo.hpp"

namespace btbd {

namespace {

constexpr char kMagic[4] = {'B', 'T', 'B', 'D'};

void tally_residual(const DataMap& residual, uint64_t& zero_cells, uint64_t& total_cells) {
    for (size_t i = 0; i < residual.cell_count(); ++i) {
        if (residual.dontcare[i]) continue;
        ++total_cells;
        if (residual.symbols[i] == 0) ++zero_cells;
    }
}

void sort_motion_records(std::vector<MvRecord>& recs) {
    std::sort(recs.begin(), recs.end(), [](const MvRecord& a, const MvRecord& b) {
        return a.rect.row != b.rect.row ? a.rect.row < b.rect.row : a.rect.col < b.rect.col;
    });
}

std::vector<MvRecord> motion_records_from_leaves(const std::vector<CuDecision>& leaves) {
    std::vector<MvRecord> recs;
    for (const auto& cu : leaves)
        if (cu.mode == PredictionMode::InterM)
            recs.push_back({cu.rect, cu.mv, cu.mv.x != 0, cu.mv.y != 0});
    sort_motion_records(recs);
    return recs;
}

}  // namespace

void write_header(BitSink& sink, const StreamHeader& h) {
    for (char c : kMagic) sink.write_byte(static_cast<uint8_t>(c));
    sink.write_byte(static_cast<uint8_t>(kStreamVersion));
    sink.write_bits(static_cast<uint64_t>(h.padded_width), 16);
    sink.write_bits(static_cast<uint64_t>(h.padded_height), 16);
    sink.write_bits(static_cast<uint64_t>(h.original_width), 16);
    sink.write_bits(static_cast<uint64_t>(h.original_height), 16);
    sink.write_bits(h.frame_count, 32);
    sink.write_byte(static_cast<uint8_t>(h.quant_step));
    sink.write_byte(static_cast<uint8_t>(h.search_range));
    sink.write_byte(static_cast<uint8_t>(h.gop_period));
}

StreamHeader read_header(BitSource& src) {
    for (char c : kMagic)
        if (src.read_byte() != static_cast<uint8_t>(c)) throw DecodeError("bad stream magic");
    if (src.read_byte() != kStreamVersion) throw DecodeError("unsupported stream version");
    StreamHeader h;
    h.padded_width = static_cast<int>(src.read_bits(16));
    h.padded_height = static_cast<int>(src.read_bits(16));
    h.original_width = static_cast<int>(src.read_bits(16));
    h.original_height = static_cast<int>(src.read_bits(16));
    h.frame_count = static_cast<uint32_t>(src.read_bits(32));
    h.quant_step = src.read_byte();
    h.search_range = src.read_byte();
    h.gop_period = src.read_byte();

    if (h.padded_width <= 0 || h.padded_height <= 0 || h.padded_width % kCtuSize != 0 ||
        h.padded_height % kCtuSize != 0 || h.padded_width > kMaxDim || h.padded_height > kMaxDim)
        throw DecodeError("unsupported frame dimensions");
    if (h.original_width < 1 || h.original_height < 1 ||
        padded_dim(h.original_width) != h.padded_width ||
        padded_dim(h.original_height) != h.padded_height)
        throw DecodeError("original dimensions inconsistent with padding");
    if (h.frame_count < 1 || h.frame_count > kMaxFrameCount)
        throw DecodeError("unsupported frame count");
    if (static_cast<uint64_t>(h.frame_count) * h.padded_width * h.padded_height > (1ull << 31))
        throw DecodeError("stream dimensions too large");
    if (h.quant_step < 1 || h.quant_step % 2 == 0 || h.quant_step > kMaxQuantStep)
        throw DecodeError("unsupported quantisation step");
    if (h.search_range < 1 || h.search_range > kMaxSearchRange)
        throw DecodeError("unsupported search range");
    if (h.gop_period < 1) throw DecodeError("unsupported GOP period");
    return h;
}

EncodeResult encode_sequence(const Sequence& input, int quant_step, int search_range,
                             int gop_period) {
    if (input.frames.empty()) throw InputError("empty sequence");
    const int w = input.frames[0].width, h = input.frames[0].height;
    for (const auto& f : input.frames)
        if (f.width != w || f.height != h ||
            f.samples.size() != static_cast<size_t>(w) * h)
            throw InputError("frames differ in size");
    if (w <= 0 || h <= 0 || w % kCtuSize != 0 || h % kCtuSize != 0 || w > kMaxDim || h > kMaxDim)
        throw InputError("frame dimensions must be multiples of 64, at most 4096");
    const int ow = input.original_width > 0 ? input.original_width : w;
    const int oh = input.original_height > 0 ? input.original_height : h;
    if (padded_dim(ow) != w || padded_dim(oh) != h)
        throw InputError("original dimensions inconsistent with padding");
    if (input.frames.size() > kMaxFrameCount) throw InputError("too many frames");
    const QuantConfig quant(quant_step);
    if (quant_step > kMaxQuantStep) throw InputError("quantisation step above 15");
    if (search_range < 1 || search_range > kMaxSearchRange)
        throw InputError("search range outside [1,64]");
    if (gop_period < 1 || gop_period > 255) throw InputError("GOP period outside [1,255]");

    EncodeResult out;
    out.header = StreamHeader{w,  h,          ow,           oh, static_cast<uint32_t>(input.frames.size()),
                              quant_step, search_range, gop_period};
    out.reconstruction.original_width = ow;
    out.reconstruction.original_height = oh;

    BitSink sink;
    write_header(sink, out.header);
    EstimatorScratch scratch;

    for (size_t i = 0; i < input.frames.size(); ++i) {
        const uint64_t frame_start = sink.size_bits();
        const bool intra = i % static_cast<size_t>(gop_period) == 0;
        sink.write_bit(intra ? 1 : 0);

        ReconBuffer recon(w, h);
        FrameCodingContext ctx;
        ctx.original = &input.frames[i];
        ctx.reference = intra ? nullptr : &out.reconstruction.frames.back();
        ctx.recon = &recon;
        ctx.quant = quant;
        ctx.search_range = search_range;
        ctx.scratch = &scratch;

        const auto leaves = plan_frame(ctx);
        const FrameMaps maps = form_maps(leaves, w, h, quant);

        FrameRecord rec;
        rec.intra = intra;
        auto code_map = [&](const DataMap& m) {
            rec.maps.push_back(MapRecord{m.kind, encode_map(m, sink)});
        };
        code_map(maps.div64);
        code_map(maps.div32);
        code_map(maps.div16);
        code_map(maps.mode);
        if (!intra) code_map(maps.mvz);
        code_map(maps.residual);

        const auto records = motion_records_from_leaves(leaves);
        rec.mv = encode_mv_field(records, w, h, search_range, sink);
        sink.align_to_byte();

        tally_residual(maps.residual, rec.zero_rank_cells, rec.coded_rank_cells);
        rec.bits = sink.size_bits() - frame_start;
        out.frames.push_back(std::move(rec));
        out.reconstruction.frames.push_back(recon.to_frame());
    }
    out.bytes = sink.take();
    return out;
}

FrameDecodeResult decode_frame(BitSource& src, const StreamHeader& header,
                               const DepthFrame* reference) {
    const int w = header.padded_width, h = header.padded_height;
    const QuantConfig quant(header.quant_step);
    FrameDecodeResult out;
    out.intra = src.read_bit() != 0;
    if (!out.intra && reference == nullptr)
        throw DecodeError("predicted frame without reference");

    DataMap div64 = make_div64_shell(w, h);
    decode_map(div64, src);
    DataMap div32 = make_div32_shell(div64);
    decode_map(div32, src);
    DataMap div16 = make_div16_shell(div32);
    decode_map(div16, src);
    const auto rects = build_leaf_rects(div64, div32, div16, w, h);

    DataMap mode = make_mode_shell(rects, w, h);
    decode_map(mode, src);
    if (out.intra)
        for (size_t i = 0; i < mode.cell_count(); ++i)
            if (!mode.dontcare[i] &&
                mode.symbols[i] != static_cast<uint8_t>(PredictionMode::Intra))
                throw DecodeError("non-intra unit in an intra frame");

    DataMap mvz = make_mvz_shell(mode);
    if (!out.intra) decode_map(mvz, src);

    DataMap residual = make_residual_shell(mode, rects, w, h, quant);
    decode_map(residual, src);

    std::vector<MvRecord> records;
    if (!out.intra) {
        for (const auto& rect : rects) {
            const int r8 = rect.row / kMinCuSize, c8 = rect.col / kMinCuSize;
            if (mode.value(0, r8, c8) != static_cast<int>(PredictionMode::InterM)) continue;
            MvRecord mr;
            mr.rect = rect;
            mr.coded_x = mvz.value(0, r8, c8) != 0;
            mr.coded_y = mvz.value(1, r8, c8) != 0;
            if (!mr.coded_x && !mr.coded_y)
                throw DecodeError("zero vector in motion-compensated unit");
            records.push_back(mr);
        }
        sort_motion_records(records);
        decode_mv_field(records, w, h, header.search_range, src);
    }
    src.align_to_byte();

    std::vector<int32_t> mv_of_cell(mode.cell_count(), -1);
    for (size_t k = 0; k < records.size(); ++k)
        mv_of_cell[mode.idx(0, records[k].rect.row / kMinCuSize,
                            records[k].rect.col / kMinCuSize)] = static_cast<int32_t>(k);

    ReconBuffer recon(w, h);
    auto unmap_pixel = [&](int pred, int row, int col) -> uint8_t {
        const int rank = residual.value(0, row, col);
        const int pred_q = round_div(pred, quant.q);
        const int bound = pred_q + round_div(255 - pred, quant.q);
        if (rank > bound) throw DecodeError("rank outside pixel alphabet");
        const int eps_q = rank_unmap(rank, pred_q, bound);
        return static_cast<uint8_t>(clamp_sample(pred + dequantize(eps_q, quant)));
    };

    for (const auto& rect : rects) {
        const size_t cell = mode.idx(0, rect.row / kMinCuSize, rect.col / kMinCuSize);
        const auto m = static_cast<PredictionMode>(mode.symbols[cell]);
        switch (m) {
            case PredictionMode::Skip:
                for (int r = 0; r < rect.size; ++r)
                    for (int c = 0; c < rect.size; ++c)
                        recon.set(rect.row + r, rect.col + c,
                                  reference->at(rect.row + r, rect.col + c));
                break;
            case PredictionMode::InterZ:
            case PredictionMode::InterM: {
                MotionVector mv{};
                if (m == PredictionMode::InterM) mv = records[mv_of_cell[cell]].mv;
                if (rect.row + mv.y < 0 || rect.col + mv.x < 0 ||
                    rect.row + mv.y + rect.size > h || rect.col + mv.x + rect.size > w)
                    throw DecodeError("motion vector outside frame");
                for (int r = 0; r < rect.size; ++r)
                    for (int c = 0; c < rect.size; ++c) {
                        const int pred = reference->at(rect.row + mv.y + r, rect.col + mv.x + c);
                        recon.set(rect.row + r, rect.col + c,
                                  unmap_pixel(pred, rect.row + r, rect.col + c));
                    }
                break;
            }
            case PredictionMode::Intra:
                for (int r = 0; r < rect.size; ++r)
                    for (int c = 0; c < rect.size; ++c) {
                        const int pred = gap_predict(recon, rect.row + r, rect.col + c);
                        recon.set(rect.row + r, rect.col + c,
                                  unmap_pixel(pred, rect.row + r, rect.col + c));
                    }
                break;
        }
    }

    tally_residual(residual, out.zero_rank_cells, out.coded_rank_cells);
    out.frame = recon.to_frame();
    return out;
}

DecodeResult decode_sequence_detailed(const std::vector<uint8_t>& bytes) {
    BitSource src(bytes);
    DecodeResult out;
    out.header = read_header(src);
    out.sequence.original_width = out.header.original_width;
    out.sequence.original_height = out.header.original_height;
    out.sequence.frames.reserve(out.header.frame_count);
    for (uint32_t i = 0; i < out.header.frame_count; ++i) {
        const DepthFrame* ref = i == 0 ? nullptr : &out.sequence.frames.back();
        auto fr = decode_frame(src, out.header, ref);
        out.zero_rank_cells += fr.zero_rank_cells;
        out.coded_rank_cells += fr.coded_rank_cells;
        out.sequence.frames.push_back(std::move(fr.frame));
    }
    return out;
}

Sequence decode_sequence(const std::vector<uint8_t>& bytes) {
    return decode_sequence_detailed(bytes).sequence;
}

}  // namespace btbd
