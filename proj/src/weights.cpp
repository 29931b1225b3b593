#include "qsmetric/weights.hpp"

#include <cmath>

namespace qsmetric {

bool operator==(const WeightExponents& x, const WeightExponents& y) {
    return x.a == y.a && x.b == y.b && x.frozen == y.frozen;
}

WeightExponents weight_exponents(const Params& params,
                                 const std::vector<std::vector<int>>& digits) {
    WeightExponents w;
    int y = 0;
    for (const auto& digit : digits) {
        const Zone z = zone_of_child(params, digit);
        if (params.capped) {
            y += (z == Zone::P3) ? -1 : 1;
            if (y == 1) {
                w.frozen = true;
                return w;
            }
        }
        if (z == Zone::P2) ++w.a;
        if (z == Zone::P3) ++w.b;
    }
    return w;
}

WeightExponents cube_weight(const Params& params, const CubeAddress& cube) {
    return weight_exponents(params, digits_of_cube(params, cube));
}

Rational weight_value(const Params& params, const WeightExponents& w) {
    Rational out = ipow(BigInt(params.multiplier()), static_cast<std::uint64_t>(w.a));
    return out * rational_pow(params.L, -static_cast<std::int64_t>(w.b));
}

double weight_value_d(const Params& params, const WeightExponents& w) {
    return to_double(weight_value(params, w));
}

double log_weight_value(const Params& params, const WeightExponents& w) {
    return w.a * params.log_multiplier() - w.b * params.log_L();
}

int compare_weight(const Params& params, const WeightExponents& x, const WeightExponents& y) {
    // alpha^xa L^-xb <=> alpha^ya L^-yb, cross-multiplied into integers.
    const BigInt alpha = params.multiplier();
    const BigInt& P = numerator(params.L);
    const BigInt& Q = denominator(params.L);
    BigInt lhs = 1, rhs = 1;
    const int da = x.a - y.a;
    const int db = y.b - x.b;  // exponent of L on the left
    if (da >= 0)
        lhs *= ipow(alpha, da);
    else
        rhs *= ipow(alpha, -da);
    if (db >= 0) {
        lhs *= ipow(P, db);
        rhs *= ipow(Q, db);
    } else {
        lhs *= ipow(Q, -db);
        rhs *= ipow(P, -db);
    }
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

WeightExponents face_weight(const Params& params, const FaceAddress& face) {
    const std::int64_t side = level_cells(params, face.level);
    if (static_cast<int>(face.coord.size()) != params.n ||
        static_cast<int>(face.fixed.size()) != params.n)
        throw domain_error("face has wrong dimension");
    int codim = 0;
    for (int i = 0; i < params.n; ++i) {
        if (face.fixed[i]) {
            ++codim;
            if (face.coord[i] < 0 || face.coord[i] > side)
                throw domain_error("face plane coordinate out of range");
        } else if (face.coord[i] < 0 || face.coord[i] >= side) {
            throw domain_error("face cell coordinate out of range");
        }
    }
    if (codim == 0) throw domain_error("face not on skeleton: codimension is zero");

    std::vector<std::vector<std::int64_t>> choices(params.n);
    for (int i = 0; i < params.n; ++i) {
        if (!face.fixed[i]) {
            choices[i] = {face.coord[i]};
            continue;
        }
        for (const std::int64_t c : {face.coord[i] - 1, face.coord[i]})
            if (c >= 0 && c < side) choices[i].push_back(c);
    }

    bool have = false;
    WeightExponents best;
    std::vector<std::size_t> pick(params.n, 0);
    CubeAddress cube;
    cube.level = face.level;
    cube.index.resize(params.n);
    for (;;) {
        for (int i = 0; i < params.n; ++i) cube.index[i] = choices[i][pick[i]];
        const WeightExponents w = cube_weight(params, cube);
        if (!have) {
            best = w;
            have = true;
        } else {
            const int c = compare_weight(params, w, best);
            if (c < 0 || (c == 0 && (w.b < best.b || (w.b == best.b && w.a < best.a))))
                best = w;
        }
        int axis = params.n - 1;
        while (axis >= 0 && ++pick[axis] == choices[axis].size()) pick[axis--] = 0;
        if (axis < 0) break;
    }
    return best;
}

}  // namespace qsmetric
