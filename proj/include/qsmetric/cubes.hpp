#ifndef QSMETRIC_CUBES_HPP
#define QSMETRIC_CUBES_HPP

#include <cstdint>
#include <vector>

#include "qsmetric/params.hpp"

namespace qsmetric {

// Child zones within a parent cube: boundary ring, buffer ring, interior.
enum class Zone { P1, P2, P3 };

// Level-k cube [I_i M^-k, (I_i+1) M^-k] per axis, I_i in [0, M^k).
struct CubeAddress {
    int level = 0;
    std::vector<std::int64_t> index;
};

bool operator==(const CubeAddress& a, const CubeAddress& b);

// M^level, guarded against overflow.
std::int64_t level_cells(const Params& params, int level);

void check_cube(const Params& params, const CubeAddress& cube);

// All M^n level-(k+1) cubes partitioning the given cube.
std::vector<CubeAddress> children(const Params& params, const CubeAddress& cube);

// Q_k^*: every level-k cube whose closure meets this cube's closure.
std::vector<CubeAddress> neighborhood(const Params& params, const CubeAddress& cube);

// Zone of a child cube at the given offset within its parent.
Zone zone_of_child(const Params& params, const std::vector<int>& offset);

struct ZoneCounts {
    std::int64_t c1 = 0, c2 = 0, c3 = 0;
};

// Closed-form counts, cross-checked against exhaustive enumeration.
ZoneCounts zone_counts(const Params& params);

// Per-level child offsets of the nested chain ending at this cube,
// most significant first.
std::vector<std::vector<int>> digits_of_cube(const Params& params, const CubeAddress& cube);

CubeAddress cube_of_digits(const Params& params, const std::vector<std::vector<int>>& digits);

// Level-j cube containing the lattice point p / M^K; on shared faces the
// lexicographically smallest containing cube is chosen.
CubeAddress containing_cube(const Params& params, const std::vector<std::int64_t>& p, int K,
                            int level);

}  // namespace qsmetric

#endif
