#include "qsmetric/cubes.hpp"

#include <algorithm>
#include <cstdlib>

namespace qsmetric {

bool operator==(const CubeAddress& a, const CubeAddress& b) {
    return a.level == b.level && a.index == b.index;
}

std::int64_t level_cells(const Params& params, int level) {
    if (level < 0) throw domain_error("level must be nonnegative");
    std::int64_t out = 1;
    for (int i = 0; i < level; ++i) {
        if (out > (std::int64_t(1) << 62) / params.M)
            throw domain_error("level too deep: M^level overflows");
        out *= params.M;
    }
    return out;
}

void check_cube(const Params& params, const CubeAddress& cube) {
    const std::int64_t side = level_cells(params, cube.level);
    if (static_cast<int>(cube.index.size()) != params.n)
        throw domain_error("cube index has wrong dimension");
    for (const std::int64_t c : cube.index)
        if (c < 0 || c >= side) throw domain_error("cube index out of range");
}

std::vector<CubeAddress> children(const Params& params, const CubeAddress& cube) {
    check_cube(params, cube);
    level_cells(params, cube.level + 1);
    std::vector<CubeAddress> out;
    out.reserve(static_cast<std::size_t>(params.cells_per_cube()));
    std::vector<int> off(params.n, 0);
    for (;;) {
        CubeAddress child;
        child.level = cube.level + 1;
        child.index.resize(params.n);
        for (int i = 0; i < params.n; ++i)
            child.index[i] = cube.index[i] * params.M + off[i];
        out.push_back(std::move(child));
        int axis = params.n - 1;
        while (axis >= 0 && ++off[axis] == params.M) off[axis--] = 0;
        if (axis < 0) break;
    }
    return out;
}

std::vector<CubeAddress> neighborhood(const Params& params, const CubeAddress& cube) {
    check_cube(params, cube);
    const std::int64_t side = level_cells(params, cube.level);
    std::vector<std::vector<std::int64_t>> choices(params.n);
    for (int i = 0; i < params.n; ++i)
        for (std::int64_t d = -1; d <= 1; ++d) {
            const std::int64_t c = cube.index[i] + d;
            if (c >= 0 && c < side) choices[i].push_back(c);
        }
    std::vector<CubeAddress> out;
    std::vector<std::size_t> pick(params.n, 0);
    for (;;) {
        CubeAddress q;
        q.level = cube.level;
        q.index.resize(params.n);
        for (int i = 0; i < params.n; ++i) q.index[i] = choices[i][pick[i]];
        out.push_back(std::move(q));
        int axis = params.n - 1;
        while (axis >= 0 && ++pick[axis] == choices[axis].size()) pick[axis--] = 0;
        if (axis < 0) break;
    }
    return out;
}

Zone zone_of_child(const Params& params, const std::vector<int>& offset) {
    if (static_cast<int>(offset.size()) != params.n)
        throw domain_error("child offset has wrong dimension");
    int ring = params.M;
    for (const int o : offset) {
        if (o < 0 || o >= params.M) throw domain_error("child offset out of range");
        ring = std::min(ring, std::min(o, params.M - 1 - o));
    }
    if (ring == 0) return Zone::P1;
    // Cell distance to the boundary ring is ring-1; the buffer test asks for
    // distance < (n-1) cells.
    if (ring - 1 < params.n - 1) return Zone::P2;
    return Zone::P3;
}

ZoneCounts zone_counts(const Params& params) {
    const auto p = [&](std::int64_t base) {
        std::int64_t out = 1;
        for (int i = 0; i < params.n; ++i) out *= base;
        return out;
    };
    ZoneCounts counts;
    counts.c1 = p(params.M) - p(params.M - 2);
    counts.c2 = p(params.M - 2) - p(params.M - 2 * params.n);
    counts.c3 = p(params.M - 2 * params.n);

    if (p(params.M) <= (std::int64_t(1) << 22)) {
        ZoneCounts seen;
        std::vector<int> off(params.n, 0);
        for (;;) {
            switch (zone_of_child(params, off)) {
                case Zone::P1: ++seen.c1; break;
                case Zone::P2: ++seen.c2; break;
                case Zone::P3: ++seen.c3; break;
            }
            int axis = params.n - 1;
            while (axis >= 0 && ++off[axis] == params.M) off[axis--] = 0;
            if (axis < 0) break;
        }
        if (seen.c1 != counts.c1 || seen.c2 != counts.c2 || seen.c3 != counts.c3)
            throw std::logic_error("zone_counts: enumeration disagrees with closed forms");
    }
    return counts;
}

std::vector<std::vector<int>> digits_of_cube(const Params& params, const CubeAddress& cube) {
    check_cube(params, cube);
    std::vector<std::vector<int>> digits(cube.level, std::vector<int>(params.n, 0));
    std::vector<std::int64_t> rest = cube.index;
    for (int j = cube.level - 1; j >= 0; --j)
        for (int i = 0; i < params.n; ++i) {
            digits[j][i] = static_cast<int>(rest[i] % params.M);
            rest[i] /= params.M;
        }
    return digits;
}

CubeAddress cube_of_digits(const Params& params, const std::vector<std::vector<int>>& digits) {
    CubeAddress cube;
    cube.level = static_cast<int>(digits.size());
    cube.index.assign(params.n, 0);
    level_cells(params, cube.level);
    for (const auto& digit : digits) {
        if (static_cast<int>(digit.size()) != params.n)
            throw domain_error("digit has wrong dimension");
        for (int i = 0; i < params.n; ++i) {
            if (digit[i] < 0 || digit[i] >= params.M)
                throw domain_error("digit out of range");
            cube.index[i] = cube.index[i] * params.M + digit[i];
        }
    }
    return cube;
}

CubeAddress containing_cube(const Params& params, const std::vector<std::int64_t>& p, int K,
                            int level) {
    if (level > K) throw domain_error("containing_cube: level exceeds resolution");
    const std::int64_t full = level_cells(params, K);
    const std::int64_t side = level_cells(params, level);
    const std::int64_t scale = full / side;
    if (static_cast<int>(p.size()) != params.n)
        throw domain_error("point has wrong dimension");
    CubeAddress cube;
    cube.level = level;
    cube.index.resize(params.n);
    for (int i = 0; i < params.n; ++i) {
        if (p[i] < 0 || p[i] > full) throw domain_error("point coordinate out of range");
        std::int64_t q = p[i] / scale;
        if (p[i] % scale == 0 && q > 0) --q;  // lexicographically smallest chain
        cube.index[i] = std::min(q, side - 1);
    }
    return cube;
}

}  // namespace qsmetric
