#pragma once

#include <cstdint>
#include <vector>

#include "btbd/bitio.hpp"
#include "btbd/frame.hpp"
#include "btbd/map_codec.hpp"
#include "btbd/mv_codec.hpp"
#include "btbd/quant.hpp"

namespace btbd {

/**
 * Fixed 20-byte stream preamble, all multi-byte fields big-endian:
 * magic "BTBD", version u8, padded width u16, padded height u16,
 * original width u16, original height u16, frame count u32,
 * quantisation step u8, search range u8, GOP period u8.
 */
struct StreamHeader {
    int padded_width = 0;
    int padded_height = 0;
    int original_width = 0;
    int original_height = 0;
    uint32_t frame_count = 0;
    int quant_step = 1;
    int search_range = 32;
    int gop_period = 8;
};

inline constexpr size_t kHeaderBytes = 20;
inline constexpr int kStreamVersion = 1;
inline constexpr int kMaxQuantStep = 15;
inline constexpr int kMaxSearchRange = 64;
inline constexpr uint32_t kMaxFrameCount = 1u << 20;

void write_header(BitSink& sink, const StreamHeader& header);

/** Reads and validates the preamble; rejects anything outside supported bounds. */
StreamHeader read_header(BitSource& src);

struct MapRecord {
    MapKind kind = MapKind::Div64;
    MapEncodeInfo info;
};

struct FrameRecord {
    bool intra = false;
    uint64_t bits = 0;  // type bit through byte alignment
    std::vector<MapRecord> maps;
    MvEncodeInfo mv;
    uint64_t zero_rank_cells = 0;
    uint64_t coded_rank_cells = 0;
};

struct EncodeResult {
    std::vector<uint8_t> bytes;
    StreamHeader header;
    Sequence reconstruction;  // encoder-side reference chain, padded frames
    std::vector<FrameRecord> frames;
};

/**
 * Encodes a padded sequence: header, then per frame a type bit (1 = intra),
 * the syntax maps in dependency order (intra frames omit the zero-component
 * bitmap), the motion payload, and byte alignment. Intra frames recur every
 * `gop_period` frames starting at frame 0.
 */
EncodeResult encode_sequence(const Sequence& input, int quant_step, int search_range,
                             int gop_period = 8);

struct FrameDecodeResult {
    DepthFrame frame;
    bool intra = false;
    uint64_t zero_rank_cells = 0;
    uint64_t coded_rank_cells = 0;
};

/** Decodes one frame; `reference` must be present iff the frame is predicted. */
FrameDecodeResult decode_frame(BitSource& src, const StreamHeader& header,
                               const DepthFrame* reference);

struct DecodeResult {
    Sequence sequence;  // padded frames; original dims from the header
    StreamHeader header;
    uint64_t zero_rank_cells = 0;
    uint64_t coded_rank_cells = 0;
};

DecodeResult decode_sequence_detailed(const std::vector<uint8_t>& bytes);
Sequence decode_sequence(const std::vector<uint8_t>& bytes);

}  // namespace btbd
