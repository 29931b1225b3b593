#ifndef QSMETRIC_WEIGHTS_HPP
#define QSMETRIC_WEIGHTS_HPP

#include <cstdint>
#include <vector>

#include "qsmetric/cubes.hpp"
#include "qsmetric/params.hpp"

namespace qsmetric {

// Exact weight (M-2n+1)^a L^-b; frozen marks a capped evaluation that stopped.
struct WeightExponents {
    int a = 0;
    int b = 0;
    bool frozen = false;
};

bool operator==(const WeightExponents& x, const WeightExponents& y);

// Weight of the cube addressed by a nested chain of child offsets. Uncapped:
// P2 digits raise a, P3 digits raise b, P1 leaves both. Capped: the running
// count Y (+1 on P1/P2, -1 on P3, updated ahead of the multiplier) freezes the
// value at the first digit where Y reaches 1; that digit's multiplier and all
// later ones are ignored.
WeightExponents weight_exponents(const Params& params,
                                 const std::vector<std::vector<int>>& digits);

WeightExponents cube_weight(const Params& params, const CubeAddress& cube);

Rational weight_value(const Params& params, const WeightExponents& w);
double weight_value_d(const Params& params, const WeightExponents& w);
double log_weight_value(const Params& params, const WeightExponents& w);

// Exact three-way comparison of represented values: -1, 0, or 1.
int compare_weight(const Params& params, const WeightExponents& x, const WeightExponents& y);

// Codimension >= 1 cell of the level-k grid: fixed[i] marks axes pinned to the
// plane coord[i] in [0, M^k]; free axes span the cell [coord[i], coord[i]+1].
struct FaceAddress {
    int level = 0;
    std::vector<std::int64_t> coord;
    std::vector<bool> fixed;
};

// Lower-semicontinuous extension: minimum weight over all incident cubes,
// decided by exact comparison.
WeightExponents face_weight(const Params& params, const FaceAddress& face);

}  // namespace qsmetric

#endif
