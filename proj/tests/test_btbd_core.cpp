#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "btbd/code_length.hpp"
#include "btbd/data_map.hpp"
#include "btbd/partition.hpp"
#include "doctest.h"

namespace {

struct Histogram {
    int64_t n = 0, sum_j = 0, sum_j2 = 0;
    void add(int j, int64_t c) {
        n += c;
        sum_j += j * c;
        sum_j2 += static_cast<int64_t>(j) * j * c;
    }
};

}  // namespace

TEST_CASE("bitmap contexts combine left and above flags") {
    btbd::DataMap map(btbd::MapKind::Div64, 1, 4, 4, 1);
    map.symbols[map.idx(0, 0, 0)] = 1;
    CHECK(btbd::context_of(map, 0, 0, 0) == 0);  // borders contribute 0
    CHECK(btbd::context_of(map, 0, 0, 1) == 1);  // left set
    CHECK(btbd::context_of(map, 0, 1, 0) == 2);  // above set
    map.symbols[map.idx(0, 0, 1)] = 1;
    map.symbols[map.idx(0, 1, 0)] = 1;
    CHECK(btbd::context_of(map, 0, 1, 1) == 3);  // both set
}

TEST_CASE("component plane adds a third context axis") {
    btbd::DataMap map(btbd::MapKind::Mvz, 2, 4, 4, 1);
    map.symbols[map.idx(0, 2, 2)] = 1;
    CHECK(btbd::context_model(btbd::MapKind::Mvz).context_count == 8);
    CHECK(btbd::context_of(map, 1, 2, 2) == 4);  // previous plane weight 2*2
    map.symbols[map.idx(1, 2, 1)] = 1;
    CHECK(btbd::context_of(map, 1, 2, 2) == 5);
}

TEST_CASE("mode contexts are four-ary with masked-cell substitution") {
    btbd::DataMap map(btbd::MapKind::Mode, 1, 8, 8, 3);
    map.symbols[map.idx(0, 0, 1)] = 3;
    map.symbols[map.idx(0, 0, 2)] = 0;
    map.symbols[map.idx(0, 1, 2)] = 2;
    CHECK(btbd::context_of(map, 0, 1, 2) == 3 * 0 + 4 * 0);  // neighbors (1,1)=0,(0,2)=0
    CHECK(btbd::context_of(map, 0, 0, 2) == 3);              // left 3, no above

    // Cells under a covering CU are masked; their contribution is the mode of
    // the covering CU's top-left cell when that cell is known.
    map.symbols[map.idx(0, 2, 0)] = 2;  // top-left of a 2x2-cell CU
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            if (dy || dx) map.dontcare[map.idx(0, 2 + dy, dx)] = 1;
    map.cover_cell.assign(map.cell_count(), -1);
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            map.cover_cell[map.idx(0, 2 + dy, dx)] = static_cast<int32_t>(map.idx(0, 2, 0));

    // (2,2): left neighbor (2,1) is masked -> substituted with mode 2;
    // above neighbor (1,2) holds mode 2.
    CHECK(btbd::context_of(map, 0, 2, 2) == 2 + 4 * 2);

    // During actual coding the substitution only fires once the covering cell
    // has been (de)coded.
    std::vector<uint8_t> known(map.cell_count(), 0);
    CHECK(btbd::internal::context_with_visibility(map, 0, 2, 2, &known) == 0);
    known[map.idx(0, 2, 0)] = 1;
    CHECK(btbd::internal::context_with_visibility(map, 0, 2, 2, &known) == 2);
    known[map.idx(0, 1, 2)] = 1;
    CHECK(btbd::internal::context_with_visibility(map, 0, 2, 2, &known) == 2 + 4 * 2);
}

TEST_CASE("residual contexts bin summed neighbor magnitudes") {
    CHECK(btbd::residual_context_bin(0) == 0);
    CHECK(btbd::residual_context_bin(4) == 0);
    CHECK(btbd::residual_context_bin(5) == 1);
    CHECK(btbd::residual_context_bin(22) == 1);
    CHECK(btbd::residual_context_bin(23) == 2);
    CHECK(btbd::residual_context_bin(117) == 2);
    CHECK(btbd::residual_context_bin(118) == 3);

    // Rank -> magnitude inverts the sign interleave: q * ceil(rank/2).
    CHECK(btbd::residual_neighbor_magnitude(20, 1) == 10);
    CHECK(btbd::residual_neighbor_magnitude(23, 1) == 12);
    CHECK(btbd::residual_neighbor_magnitude(5, 3) == 9);
    CHECK(btbd::residual_neighbor_magnitude(0, 15) == 0);

    btbd::DataMap map(btbd::MapKind::Residual, 1, 4, 4, 255);
    map.quant_step = 1;
    map.symbols[map.idx(0, 1, 0)] = 20;  // left magnitude 10
    map.symbols[map.idx(0, 0, 1)] = 23;  // above magnitude 12
    CHECK(btbd::context_of(map, 0, 1, 1) == 1);  // 22 -> second bin
    map.symbols[map.idx(0, 0, 1)] = 25;          // above magnitude 13
    CHECK(btbd::context_of(map, 0, 1, 1) == 2);  // 23 -> third bin
}

TEST_CASE("skew parameter estimate") {
    SUBCASE("all mass at zero degenerates to 1") {
        CHECK(btbd::estimate_p_hat(100, 0, 0, 255) == 1.0);
    }

    SUBCASE("geometric histograms recover the parameter") {
        for (double p_true : {0.05, 0.1}) {
            Histogram h;
            for (int j = 0; j <= 255; ++j) {
                const auto c = std::llround(100000.0 * p_true * std::pow(1.0 - p_true, j));
                if (c > 0) h.add(j, c);
            }
            const double est = btbd::estimate_p_hat(h.n, h.sum_j, h.sum_j2, 255);
            CHECK(est == doctest::Approx(p_true).epsilon(0.15));
        }
    }

    SUBCASE("uniform histograms estimate far below the flat threshold") {
        Histogram h;
        for (int j = 0; j <= 255; ++j) h.add(j, 10);
        const double est = btbd::estimate_p_hat(h.n, h.sum_j, h.sum_j2, 255);
        CHECK(est == doctest::Approx(0.000183108).epsilon(1e-4));
        CHECK(est < std::exp2(-3.5));
    }

    SUBCASE("sharply skewed small supports clamp to 1") {
        Histogram h;
        h.add(0, 8);
        h.add(1, 4);
        h.add(2, 2);
        h.add(3, 1);
        CHECK(btbd::estimate_p_hat(h.n, h.sum_j, h.sum_j2, 255) == 1.0);
    }

    SUBCASE("estimates clamp into (0, 1]") {
        CHECK(btbd::estimate_p_hat(10, 1000, 1, 255) > 0.0);
        CHECK(btbd::estimate_p_hat(10, 1, 3, 3) <= 1.0);
    }
}

TEST_CASE("static-model cost") {
    // Bitmaps: half a free parameter, (1/2) log2 n.
    CHECK(btbd::model_cost(1024, 1, 0.3) == doctest::Approx(5.0));
    CHECK(btbd::model_cost(2, 1, 1.0) == doctest::Approx(0.5));

    // At the flat threshold the alphabet correction vanishes: (255/2) * 10.
    CHECK(btbd::model_cost(1024, 255, std::exp2(-3.5)) == doctest::Approx(1275.0));

    // The corrected parameter count is clamped into [1, R].
    CHECK(btbd::model_cost(1024, 255, 1.0) == doctest::Approx(1275.0));
    const double flat = btbd::model_cost(1024, 255, 1e-12);
    CHECK(flat > 5.0);
    CHECK(flat < 1275.0);
    CHECK(btbd::model_cost(1024, 255, 1e-12) >= 0.5 * 10.0);
}

TEST_CASE("code-length estimate") {
    SUBCASE("uniform regions cost nothing") {
        btbd::DataMap map(btbd::MapKind::Div64, 1, 8, 8, 1);
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map)) == 0);
        for (auto& v : map.symbols) v = 1;
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map)) == 0);
    }

    SUBCASE("two cells, two symbols") {
        btbd::DataMap map(btbd::MapKind::Div64, 1, 1, 2, 1);
        map.symbols[1] = 1;
        // One context holds both cells: 2 bits entropy + 0.5 model -> ceil 3.
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map)) == 3);
    }

    SUBCASE("an exact half-and-half bitmap without contexts") {
        btbd::DataMap map(btbd::MapKind::Div64, 1, 64, 64, 1);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) map.symbols[map.idx(0, r, c)] = (r + c) & 1;
        // 4096 * H(1/2) + (1/2) log2 4096 = 4096 + 6.
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map), false) == 4102);
        // Contexts make the checkerboard nearly free (borders aside).
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map), true) < 300);
    }

    SUBCASE("don't-care cells are skipped") {
        btbd::DataMap map(btbd::MapKind::Div64, 1, 4, 4, 1);
        map.symbols[map.idx(0, 1, 1)] = 1;
        map.dontcare[map.idx(0, 1, 1)] = 1;
        CHECK(btbd::estimate_code_length(map, btbd::Region::whole(map)) == 0);
    }
}

TEST_CASE("best split of a two-band bitmap cuts between the bands") {
    btbd::DataMap map(btbd::MapKind::Div64, 1, 4, 4, 1);
    for (int r = 0; r < 4; ++r)
        for (int c = 2; c < 4; ++c) map.symbols[map.idx(0, r, c)] = 1;
    btbd::EstimatorScratch scratch;
    const btbd::SplitChoice choice = btbd::best_split(map, btbd::Region::whole(map), scratch);
    REQUIRE(choice.found);
    CHECK(choice.axis == btbd::Axis::X);
    CHECK(choice.position == 2);
    // Both halves uniform (0 bits); signal = 2-bit axis code + 2-bit position.
    CHECK(choice.cost == 4);
}

TEST_CASE("best split matches an exhaustive sweep on random bitmaps") {
    std::mt19937 rng(23);
    btbd::EstimatorScratch scratch;
    for (int trial = 0; trial < 30; ++trial) {
        btbd::DataMap map(btbd::MapKind::Div32, 1, 5, 7, 1);
        for (auto& v : map.symbols) v = rng() & 1;
        for (auto& m : map.dontcare) m = rng() % 8 == 0;
        const btbd::Region whole = btbd::Region::whole(map);

        bool found = false;
        btbd::Axis best_axis = btbd::Axis::X;
        int best_pos = 0;
        uint64_t best_cost = 0;
        auto consider = [&](btbd::Axis axis, int extent) {
            for (int s = 1; s < extent; ++s) {
                const auto [a, b] = btbd::split_region(whole, axis, s);
                const uint64_t cost = btbd::estimate_code_length(map, a, scratch) +
                                      btbd::estimate_code_length(map, b, scratch) +
                                      btbd::split_signal_bits(map, axis, extent);
                if (!found || cost < best_cost) {
                    found = true;
                    best_axis = axis;
                    best_pos = s;
                    best_cost = cost;
                }
            }
        };
        consider(btbd::Axis::X, whole.extent_x());
        consider(btbd::Axis::Y, whole.extent_y());

        const btbd::SplitChoice choice = btbd::best_split(map, whole, scratch);
        REQUIRE(choice.found == found);
        CHECK(choice.axis == best_axis);
        CHECK(choice.position == best_pos);
        CHECK(choice.cost == best_cost);
    }
}

TEST_CASE("integer maps only split halfway") {
    btbd::DataMap map(btbd::MapKind::Mode, 1, 6, 5, 3);
    std::mt19937 rng(7);
    for (auto& v : map.symbols) v = rng() % 4;
    btbd::EstimatorScratch scratch;
    const btbd::SplitChoice choice = btbd::best_split(map, btbd::Region::whole(map), scratch);
    REQUIRE(choice.found);
    const int extent = choice.axis == btbd::Axis::X ? 5 : 6;
    CHECK(choice.position == extent / 2);
}

TEST_CASE("an all-zero plane next to a busy plane favors a plane split") {
    btbd::DataMap map(btbd::MapKind::Mvz, 2, 8, 8, 1);
    std::mt19937 rng(19);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) map.symbols[map.idx(1, r, c)] = rng() & 1;
    btbd::EstimatorScratch scratch;
    const btbd::SplitChoice choice = btbd::best_split(map, btbd::Region::whole(map), scratch);
    REQUIRE(choice.found);
    CHECK(choice.axis == btbd::Axis::P);
    CHECK(choice.position == 1);
}

namespace {

void check_leaf_classes(const btbd::DataMap& map, const btbd::PartitionNode& node,
                        int* leaves, int* splits) {
    if (node.is_leaf()) {
        ++*leaves;
        int symbol = 0;
        const int profile = btbd::region_symbol_profile(map, node.region, &symbol);
        switch (node.code) {
            case btbd::NodeCode::LeafZero:
                CHECK(profile <= 1);
                if (profile == 1) CHECK(symbol == 0);
                break;
            case btbd::NodeCode::LeafSame:
                CHECK(profile == 1);
                CHECK(symbol != 0);
                CHECK(node.same_value == symbol);
                break;
            default:
                CHECK(profile == 2);
        }
        return;
    }
    ++*splits;
    REQUIRE(node.first);
    REQUIRE(node.second);
    CHECK(node.first->region.cells() + node.second->region.cells() == node.region.cells());
    check_leaf_classes(map, *node.first, leaves, splits);
    check_leaf_classes(map, *node.second, leaves, splits);
}

}  // namespace

TEST_CASE("decomposition of structured bitmaps") {
    btbd::EstimatorScratch scratch;

    SUBCASE("all zero collapses to a single type-I leaf") {
        btbd::DataMap map(btbd::MapKind::Div16, 1, 16, 16, 1);
        const auto tree = btbd::decompose(map, btbd::Region::whole(map), scratch);
        CHECK(tree->code == btbd::NodeCode::LeafZero);
        CHECK(tree->realized_bits == 0);
    }

    SUBCASE("a solid rectangle splits off cheaply") {
        btbd::DataMap map(btbd::MapKind::Div16, 1, 16, 16, 1);
        for (int r = 4; r < 12; ++r)
            for (int c = 5; c < 13; ++c) map.symbols[map.idx(0, r, c)] = 1;
        const auto tree = btbd::decompose(map, btbd::Region::whole(map), scratch);
        CHECK(!tree->is_leaf());
        CHECK(tree->realized_bits < tree->flat_bits);

        int leaves = 0, splits = 0;
        check_leaf_classes(map, *tree, &leaves, &splits);
        CHECK(leaves == splits + 1);
    }

    SUBCASE("noise stays a type-III leaf when splitting cannot pay") {
        btbd::DataMap map(btbd::MapKind::Div16, 1, 4, 4, 1);
        std::mt19937 rng(1);
        for (auto& v : map.symbols) v = rng() & 1;
        const auto tree = btbd::decompose(map, btbd::Region::whole(map), scratch);
        if (tree->is_leaf()) {
            CHECK(tree->code == btbd::NodeCode::LeafMixed);
            CHECK(tree->realized_bits == tree->flat_bits);
        } else {
            CHECK(tree->realized_bits < tree->flat_bits);
        }
    }
}
