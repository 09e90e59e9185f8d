#pragma once

#include <cmath>
#include <random>
#include <unordered_set>

#include "spmmkit/types.hpp"

namespace spmmkit {

/// R-MAT recursive quadrant-descent generator parameters. The matrix is
/// square with dimension 2^scale; (a, b, c, d) are the quadrant
/// probabilities (top-left, top-right, bottom-left, bottom-right) and must
/// sum to 1. Larger `a` skews mass toward low row/column indices.
struct RmatParams {
    int scale = 10;
    Index target_nnz = 0;
    double a = 0.25, b = 0.25, c = 0.25, d = 0.25;
    std::uint64_t seed = 0;
};

inline void validate(const RmatParams& p) {
    if (p.scale < 0 || p.scale > 30)
        throw std::invalid_argument("rmat: scale must be in [0, 30]");
    for (double q : {p.a, p.b, p.c, p.d})
        if (q < 0.0 || q > 1.0)
            throw std::invalid_argument("rmat: quadrant probabilities must be in [0, 1]");
    if (std::abs(p.a + p.b + p.c + p.d - 1.0) > 1e-9)
        throw std::invalid_argument("rmat: quadrant probabilities must sum to 1");
    if (p.target_nnz < 0)
        throw std::invalid_argument("rmat: target_nnz must be nonnegative");
    const double cells = std::ldexp(1.0, 2 * p.scale);
    if (static_cast<double>(p.target_nnz) > cells)
        throw std::invalid_argument("rmat: target_nnz exceeds 2^(2*scale) cells");
}

class RmatGenerationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Draws distinct coordinates by recursive quadrant descent, deduplicating
/// and redrawing up to a cap of 10 x target_nnz total draws. If the cap is
/// hit, nnz may fall short of the target; a shortfall below 0.99 x target
/// is an error. Values are uniform in (0, 1]. Bit-identical replay for a
/// fixed parameter set.
template <class T = double>
CsrMatrix<T> generate_rmat(const RmatParams& p) {
    validate(p);
    const Index dim = Index(1) << p.scale;

    std::mt19937_64 structure_rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::unordered_set<std::uint64_t> cells;
    cells.reserve(static_cast<std::size_t>(p.target_nnz) * 2);
    const Index draw_cap = 10 * p.target_nnz;
    Index draws = 0;
    while (static_cast<Index>(cells.size()) < p.target_nnz && draws < draw_cap) {
        Index row = 0, col = 0;
        for (int level = 0; level < p.scale; ++level) {
            const double u = unit(structure_rng);
            row <<= 1;
            col <<= 1;
            if (u < p.a) {
                // top-left: no bits set
            } else if (u < p.a + p.b) {
                col |= 1;
            } else if (u < p.a + p.b + p.c) {
                row |= 1;
            } else {
                row |= 1;
                col |= 1;
            }
        }
        cells.insert((static_cast<std::uint64_t>(row) << p.scale) |
                     static_cast<std::uint64_t>(col));
        ++draws;
    }
    if (static_cast<double>(cells.size()) < 0.99 * static_cast<double>(p.target_nnz))
        throw RmatGenerationError("rmat: draw cap exhausted at " +
                                  std::to_string(cells.size()) + " of " +
                                  std::to_string(p.target_nnz) + " target nonzeros");

    std::vector<std::tuple<Index, Index, T>> triplets;
    triplets.reserve(cells.size());
    for (std::uint64_t packed : cells)
        triplets.emplace_back(static_cast<Index>(packed >> p.scale),
                              static_cast<Index>(packed & ((std::uint64_t(1) << p.scale) - 1)),
                              T(0));
    // Hash-set iteration order is not pinned by the standard; sort before
    // assigning values so replay is bit-identical.
    std::sort(triplets.begin(), triplets.end());

    std::mt19937_64 value_rng(p.seed ^ 0x9e3779b97f4a7c15ull);
    for (auto& t : triplets)
        std::get<2>(t) = static_cast<T>(1.0 - unit(value_rng));  // (0, 1]

    return CsrMatrix<T>::from_coo(dim, dim, std::move(triplets));
}

}  // namespace spmmkit
