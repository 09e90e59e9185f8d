#pragma once

#include <cmath>
#include <optional>

#include "spmmkit/types.hpp"

namespace spmmkit {

/// Selector input features: nonzero count, row count, population standard
/// deviation of per-row nonzero counts, dense-operand width, and an optional
/// hardware tag for the unified model.
struct FeatureVector {
    Index nnz = 0;
    Index mat_size = 0;  // number of rows
    double std_row = 0.0;
    Index n_cols = 0;
    std::optional<int> hardware_id;
};

template <class T>
FeatureVector extract_features(const CsrMatrix<T>& m, Index n_cols,
                               std::optional<int> hardware_id = std::nullopt) {
    if (m.num_rows == 0)
        throw std::invalid_argument("extract_features: matrix has no rows to summarize");

    const Index rows = m.num_rows;
    double mean = static_cast<double>(m.nnz()) / static_cast<double>(rows);
    double ss = 0.0;
    for (Index r = 0; r < rows; ++r) {
        const double d = static_cast<double>(m.row_nnz(r)) - mean;
        ss += d * d;
    }
    FeatureVector fv;
    fv.nnz = m.nnz();
    fv.mat_size = rows;
    fv.std_row = std::sqrt(ss / static_cast<double>(rows));
    fv.n_cols = n_cols;
    fv.hardware_id = hardware_id;
    return fv;
}

}  // namespace spmmkit
