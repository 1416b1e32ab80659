#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "btbd/bitio.hpp"
#include "btbd/data_map.hpp"
#include "btbd/partition.hpp"

namespace btbd {

/**
 * Whole-map coding modes: partitioned/unpartitioned x context-adaptive/
 * context-free arithmetic coding, plus a zero-run mode for residual maps.
 */
enum class MapCodingMode : uint8_t {
    PartitionedContext = 0,
    PartitionedContextFree = 1,
    WholeContext = 2,
    WholeContextFree = 3,
    ZeroRun = 4,  // residual maps only
};

inline int map_mode_signal_bits(MapKind kind) { return kind == MapKind::Residual ? 3 : 2; }

struct MapEncodeInfo {
    MapCodingMode chosen = MapCodingMode::WholeContextFree;
    uint64_t payload_bits = 0;                 // excludes mode signal / bound byte
    std::array<uint64_t, 5> candidate_bits{};  // indexed by MapCodingMode
    int candidate_count = 4;
};

/** Writes one mode's payload (no mode signal, no alphabet-bound byte). */
void encode_map_payload(const DataMap& map, MapCodingMode mode, BitSink& sink);

/**
 * Picks the cheapest eligible mode by actually coding each candidate, then
 * writes the mode signal (2 bits; 3 plus an 8-bit alphabet bound for residual
 * maps) followed by that payload.
 */
MapEncodeInfo encode_map(const DataMap& map, BitSink& sink);

/**
 * Decodes a map whose shell (kind, dimensions, don't-care mask, quant_step,
 * cover_cell) has been prepared by the caller; fills `symbols` and, for
 * residual maps, `alphabet_bound`.
 */
void decode_map(DataMap& map, BitSource& src);

/** Zero-proportion tally over coded residual cells, for stats reporting. */
struct RankTally {
    uint64_t zero_cells = 0;
    uint64_t coded_cells = 0;
};

}  // namespace btbd
