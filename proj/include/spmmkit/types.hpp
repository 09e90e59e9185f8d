#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace spmmkit {

using Index = std::int64_t;

enum class Layout { RowMajor, ColMajor };

inline const char* layout_name(Layout l) {
    return l == Layout::RowMajor ? "RowMajor" : "ColMajor";
}

/// Sparse operand in Compressed Sparse Row form.
///
/// Invariants (checked by validate(), relied on everywhere else):
///   row_offsets[0] == 0, row_offsets[num_rows] == nnz, nondecreasing;
///   col_indices[i] < num_cols; columns strictly increasing within a row;
///   col_indices.size() == values.size().
template <class T>
struct CsrMatrix {
    Index num_rows = 0;
    Index num_cols = 0;
    std::vector<Index> row_offsets{0};
    std::vector<Index> col_indices;
    std::vector<T> values;

    Index nnz() const { return static_cast<Index>(col_indices.size()); }
    Index row_nnz(Index m) const { return row_offsets[m + 1] - row_offsets[m]; }

    static CsrMatrix identity(Index n) {
        CsrMatrix m;
        m.num_rows = m.num_cols = n;
        m.row_offsets.resize(n + 1);
        m.col_indices.resize(n);
        m.values.resize(n);
        for (Index i = 0; i < n; ++i) {
            m.row_offsets[i] = i;
            m.col_indices[i] = i;
            m.values[i] = T(1);
        }
        m.row_offsets[n] = n;
        return m;
    }

    /// Builds CSR from (row, col, value) triplets. Triplets may arrive in any
    /// order; duplicate coordinates are summed.
    static CsrMatrix from_coo(Index num_rows, Index num_cols,
                              std::vector<std::tuple<Index, Index, T>> triplets) {
        for (const auto& [r, c, v] : triplets) {
            if (r < 0 || r >= num_rows || c < 0 || c >= num_cols)
                throw std::invalid_argument("from_coo: coordinate out of bounds");
        }
        std::sort(triplets.begin(), triplets.end(),
                  [](const auto& x, const auto& y) {
                      return std::tie(std::get<0>(x), std::get<1>(x)) <
                             std::tie(std::get<0>(y), std::get<1>(y));
                  });
        CsrMatrix m;
        m.num_rows = num_rows;
        m.num_cols = num_cols;
        m.row_offsets.assign(num_rows + 1, 0);
        m.col_indices.reserve(triplets.size());
        m.values.reserve(triplets.size());
        for (std::size_t i = 0; i < triplets.size();) {
            const auto [r, c, v0] = triplets[i];
            T v = v0;
            std::size_t j = i + 1;
            while (j < triplets.size() && std::get<0>(triplets[j]) == r &&
                   std::get<1>(triplets[j]) == c) {
                v += std::get<2>(triplets[j]);
                ++j;
            }
            m.col_indices.push_back(c);
            m.values.push_back(v);
            ++m.row_offsets[r + 1];
            i = j;
        }
        for (Index r = 0; r < num_rows; ++r)
            m.row_offsets[r + 1] += m.row_offsets[r];
        return m;
    }
};

/// Checks every CsrMatrix invariant. Returns an empty list when the matrix is
/// valid; otherwise one message per violation naming the invariant and the
/// first offending index.
template <class T>
std::vector<std::string> validate(const CsrMatrix<T>& m) {
    std::vector<std::string> issues;
    const Index nnz = m.nnz();

    if (m.num_rows < 0) issues.push_back("num_rows negative");
    if (m.num_cols < 0) issues.push_back("num_cols negative");
    if (m.col_indices.size() != m.values.size())
        issues.push_back("nnz mismatch: col_indices length " +
                         std::to_string(m.col_indices.size()) + " vs values length " +
                         std::to_string(m.values.size()));
    if (static_cast<Index>(m.row_offsets.size()) != m.num_rows + 1) {
        issues.push_back("row_offsets length " + std::to_string(m.row_offsets.size()) +
                         ", expected num_rows+1 = " + std::to_string(m.num_rows + 1));
        return issues;  // offsets unusable, stop before indexing with them
    }
    if (m.row_offsets[0] != 0)
        issues.push_back("row_offsets[0] != 0");
    bool monotone = true;
    for (Index i = 1; i <= m.num_rows; ++i) {
        if (m.row_offsets[i] < m.row_offsets[i - 1]) {
            issues.push_back("row_offsets nondecreasing violated at index " +
                             std::to_string(i));
            monotone = false;
            break;
        }
    }
    if (m.row_offsets[m.num_rows] != nnz)
        issues.push_back("row_offsets[num_rows] = " +
                         std::to_string(m.row_offsets[m.num_rows]) + " != nnz = " +
                         std::to_string(nnz));

    for (Index i = 0; i < nnz; ++i) {
        if (m.col_indices[i] < 0 || m.col_indices[i] >= m.num_cols) {
            issues.push_back("col index bound violated at index " + std::to_string(i) +
                             " (col " + std::to_string(m.col_indices[i]) + ")");
            break;
        }
    }
    if (monotone && m.row_offsets[m.num_rows] == nnz) {
        for (Index r = 0; r < m.num_rows; ++r) {
            for (Index i = m.row_offsets[r] + 1; i < m.row_offsets[r + 1]; ++i) {
                if (m.col_indices[i] <= m.col_indices[i - 1]) {
                    issues.push_back("columns strictly increasing violated in row " +
                                     std::to_string(r) + " at index " + std::to_string(i));
                    r = m.num_rows;
                    break;
                }
            }
        }
    }
    return issues;
}

template <class T>
bool is_valid(const CsrMatrix<T>& m) {
    return validate(m).empty();
}

/// Dense operand/result with an explicit memory layout.
/// Element (r, c) lives at r*num_cols + c when RowMajor and at
/// c*num_rows + r when ColMajor.
template <class T>
struct DenseMatrix {
    Index num_rows = 0;
    Index num_cols = 0;
    Layout layout = Layout::RowMajor;
    std::vector<T> data;

    DenseMatrix() = default;
    DenseMatrix(Index rows, Index cols, Layout l = Layout::RowMajor)
        : num_rows(rows), num_cols(cols), layout(l),
          data(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), T(0)) {}

    std::size_t index_of(Index r, Index c) const {
        return layout == Layout::RowMajor
                   ? static_cast<std::size_t>(r) * num_cols + c
                   : static_cast<std::size_t>(c) * num_rows + r;
    }
    T& at(Index r, Index c) { return data[index_of(r, c)]; }
    const T& at(Index r, Index c) const { return data[index_of(r, c)]; }

    static DenseMatrix zeros(Index rows, Index cols, Layout l = Layout::RowMajor) {
        return DenseMatrix(rows, cols, l);
    }

    /// Seeded uniform fill in [-1, 1]; element values are assigned in logical
    /// (row, col) order so the same seed gives the same logical matrix under
    /// either layout.
    static DenseMatrix random(Index rows, Index cols, Layout l, std::uint64_t seed) {
        DenseMatrix m(rows, cols, l);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c)
                m.at(r, c) = static_cast<T>(dist(rng));
        return m;
    }
};

/// Re-lays a dense matrix in the target layout. Converting to the current
/// layout copies unchanged.
template <class T>
DenseMatrix<T> convert_layout(const DenseMatrix<T>& m, Layout target) {
    if (m.layout == target) return m;
    DenseMatrix<T> out(m.num_rows, m.num_cols, target);
    for (Index r = 0; r < m.num_rows; ++r)
        for (Index c = 0; c < m.num_cols; ++c)
            out.at(r, c) = m.at(r, c);
    return out;
}

}  // namespace spmmkit
