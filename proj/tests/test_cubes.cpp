#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "qsmetric/cubes.hpp"

using namespace qsmetric;

namespace {

// Literal zone test: P1 touches the parent boundary; P2 has Euclidean set
// distance to the union of P1 cells below (n-1)/M at unit parent size.
Zone zone_by_set_distance(const Params& params, const std::vector<int>& off) {
    const int M = params.M, n = params.n;
    for (const int o : off)
        if (o == 0 || o == M - 1) return Zone::P1;
    double best = 1e300;
    std::vector<int> p(n, 0);
    for (;;) {
        bool boundary = false;
        for (const int c : p)
            if (c == 0 || c == M - 1) boundary = true;
        if (boundary) {
            double s = 0;
            for (int i = 0; i < n; ++i) {
                const double gap = std::max(0, std::abs(off[i] - p[i]) - 1);
                s += gap * gap;
            }
            best = std::min(best, std::sqrt(s) / M);
        }
        int axis = n - 1;
        while (axis >= 0 && ++p[axis] == M) p[axis--] = 0;
        if (axis < 0) break;
    }
    return best < double(n - 1) / M ? Zone::P2 : Zone::P3;
}

}  // namespace

TEST_SUITE("cubes") {
    TEST_CASE("zone ring rule on known offsets") {
        const Params p(2, 8, 8);
        CHECK_EQ(zone_of_child(p, {0, 3}), Zone::P1);
        CHECK_EQ(zone_of_child(p, {1, 4}), Zone::P2);
        CHECK_EQ(zone_of_child(p, {2, 2}), Zone::P3);
        CHECK_EQ(zone_of_child(p, {7, 7}), Zone::P1);
        CHECK_EQ(zone_of_child(p, {6, 3}), Zone::P2);
        CHECK_THROWS_AS(zone_of_child(p, {8, 0}), domain_error);
        CHECK_THROWS_AS(zone_of_child(p, {0}), domain_error);
    }

    TEST_CASE("ring rule agrees with the Euclidean set-distance definition") {
        for (const Params& p : {Params(2, 8, 8), Params(2, 16, 4096), Params(3, 8, 8)}) {
            std::vector<int> off(p.n, 0);
            for (;;) {
                CHECK_EQ(zone_of_child(p, off), zone_by_set_distance(p, off));
                int axis = p.n - 1;
                while (axis >= 0 && ++off[axis] == p.M) off[axis--] = 0;
                if (axis < 0) break;
            }
        }
    }

    TEST_CASE("zone counts match closed forms") {
        ZoneCounts c = zone_counts(Params(2, 8, 8));
        CHECK_EQ(c.c1, 28);
        CHECK_EQ(c.c2, 20);
        CHECK_EQ(c.c3, 16);

        c = zone_counts(Params(2, 16, 8));
        CHECK_EQ(c.c1, 60);
        CHECK_EQ(c.c2, 52);
        CHECK_EQ(c.c3, 144);

        c = zone_counts(Params(3, 8, 8));
        CHECK_EQ(c.c1, 296);
        CHECK_EQ(c.c2, 208);
        CHECK_EQ(c.c3, 8);
        CHECK_EQ(c.c1 + c.c2 + c.c3, 512);
    }

    TEST_CASE("children partition the parent") {
        const Params p(2, 8, 8);
        const CubeAddress cube{1, {3, 5}};
        const auto kids = children(p, cube);
        REQUIRE_EQ(kids.size(), 64);
        std::set<std::pair<std::int64_t, std::int64_t>> seen;
        for (const auto& k : kids) {
            CHECK_EQ(k.level, 2);
            CHECK_GE(k.index[0], 3 * 8);
            CHECK_LT(k.index[0], 4 * 8);
            CHECK_GE(k.index[1], 5 * 8);
            CHECK_LT(k.index[1], 6 * 8);
            seen.insert({k.index[0], k.index[1]});
        }
        CHECK_EQ(seen.size(), 64);
    }

    TEST_CASE("neighborhood sizes lie in [2^n, 3^n] for k >= 1") {
        const Params p(2, 8, 8);
        CHECK_EQ(neighborhood(p, {1, {0, 0}}).size(), 4);    // corner
        CHECK_EQ(neighborhood(p, {1, {0, 3}}).size(), 6);    // edge
        CHECK_EQ(neighborhood(p, {1, {4, 3}}).size(), 9);    // interior
        CHECK_EQ(neighborhood(p, {0, {0, 0}}).size(), 1);    // whole cube

        const Params q(3, 8, 8);
        CHECK_EQ(neighborhood(q, {1, {0, 0, 0}}).size(), 8);
        CHECK_EQ(neighborhood(q, {1, {4, 4, 4}}).size(), 27);
    }

    TEST_CASE("digit chains round-trip") {
        const Params p(2, 8, 8);
        const CubeAddress cube{3, {137, 500}};
        const auto digits = digits_of_cube(p, cube);
        REQUIRE_EQ(digits.size(), 3);
        CHECK_EQ(cube_of_digits(p, digits), cube);
        // 137 = 2*64 + 1*8 + 1, 500 = 7*64 + 6*8 + 4
        CHECK_EQ(digits[0][0], 2);
        CHECK_EQ(digits[1][0], 1);
        CHECK_EQ(digits[2][0], 1);
        CHECK_EQ(digits[0][1], 7);
        CHECK_EQ(digits[1][1], 6);
        CHECK_EQ(digits[2][1], 4);

        CHECK_THROWS_AS(cube_of_digits(p, {{8, 0}}), domain_error);
    }

    TEST_CASE("containing cube picks the lexicographically smallest chain") {
        const Params p(2, 8, 8);
        // Interior point (1/8, 1/8) expressed at resolution 2 is (8, 8); it lies
        // on a corner shared by four level-1 cubes.
        CubeAddress c = containing_cube(p, {8, 8}, 2, 1);
        CHECK_EQ(c.index, std::vector<std::int64_t>({0, 0}));
        c = containing_cube(p, {9, 8}, 2, 1);
        CHECK_EQ(c.index, std::vector<std::int64_t>({1, 0}));
        // Domain boundary points clamp inward.
        c = containing_cube(p, {0, 64}, 2, 1);
        CHECK_EQ(c.index, std::vector<std::int64_t>({0, 7}));
        // Level 0 is always the unit cube.
        c = containing_cube(p, {17, 31}, 2, 0);
        CHECK_EQ(c.index, std::vector<std::int64_t>({0, 0}));
    }

    TEST_CASE("level_cells guards overflow") {
        const Params p(2, 8, 8);
        CHECK_EQ(level_cells(p, 3), 512);
        CHECK_THROWS_AS(level_cells(p, 40), domain_error);
        CHECK_THROWS_AS(level_cells(p, -1), domain_error);
    }
}
