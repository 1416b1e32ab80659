#pragma once

#include <cstdint>

#include "btbd/bitio.hpp"
#include "btbd/common.hpp"

namespace btbd {

/** Partition-tree node symbols; leaves by content class, splits by axis. */
enum class NodeCode : uint8_t {
    LeafZero,   // type I: all coded cells are 0
    LeafSame,   // type II: all coded cells share one nonzero symbol
    LeafMixed,  // type III: mixed content, coded arithmetically
    SplitX,
    SplitY,
    SplitP,
};

struct Codeword {
    uint8_t bits;
    uint8_t length;
};

/** Fixed Huffman codes of tree-node symbols; bitmaps and intmaps differ. */
inline Codeword node_codeword(NodeCode code, bool bitmap) {
    if (bitmap) {
        switch (code) {
            case NodeCode::LeafZero: return {0b00, 2};
            case NodeCode::LeafSame: return {0b1000, 4};
            case NodeCode::LeafMixed: return {0b101, 3};
            case NodeCode::SplitX: return {0b11, 2};
            case NodeCode::SplitY: return {0b01, 2};
            case NodeCode::SplitP: return {0b1001, 4};
        }
    } else {
        switch (code) {
            case NodeCode::LeafZero: return {0b001, 3};
            case NodeCode::LeafSame: return {0b000, 3};
            case NodeCode::LeafMixed: return {0b01, 2};
            case NodeCode::SplitX: return {0b11, 2};
            case NodeCode::SplitY: return {0b10, 2};
            case NodeCode::SplitP: break;  // no plane splits in 2D integer maps
        }
    }
    throw InputError("no codeword for this node symbol");
}

inline void write_node_code(BitSink& sink, NodeCode code, bool bitmap) {
    const Codeword cw = node_codeword(code, bitmap);
    sink.write_bits(cw.bits, cw.length);
}

inline NodeCode read_node_code(BitSource& src, bool bitmap) {
    if (bitmap) {
        if (src.read_bit() == 0) return src.read_bit() ? NodeCode::SplitY : NodeCode::LeafZero;
        if (src.read_bit() == 1) return NodeCode::SplitX;
        if (src.read_bit() == 1) return NodeCode::LeafMixed;
        return src.read_bit() ? NodeCode::SplitP : NodeCode::LeafSame;
    }
    if (src.read_bit() == 0) {
        if (src.read_bit() == 1) return NodeCode::LeafMixed;
        return src.read_bit() ? NodeCode::LeafZero : NodeCode::LeafSame;
    }
    return src.read_bit() ? NodeCode::SplitX : NodeCode::SplitY;
}

}  // namespace btbd
