#pragma once

#include <algorithm>
#include <span>

#include "spmmkit/types.hpp"

namespace spmmkit {

/// A disjoint contiguous cover of [0, nnz) with one chunk per worker.
/// Chunk sizes differ by at most one; row_of_chunk_start[p] is the row
/// containing the chunk's first element (num_rows for empty trailing chunks).
struct ElementPartition {
    struct Chunk {
        Index begin = 0;
        Index end = 0;
        Index size() const { return end - begin; }
    };
    std::vector<Chunk> chunk_bounds;
    std::vector<Index> row_of_chunk_start;
};

namespace detail {

/// Row containing element `e`, given CSR offsets. Skips empty rows. Assumes
/// 0 <= e < nnz.
inline Index row_of_element(std::span<const Index> row_offsets, Index e) {
    auto it = std::upper_bound(row_offsets.begin(), row_offsets.end(), e);
    return static_cast<Index>(it - row_offsets.begin()) - 1;
}

}  // namespace detail

template <class T>
Index row_index_of(const CsrMatrix<T>& a, Index element_index) {
    if (element_index < 0 || element_index >= a.nnz())
        throw std::out_of_range("row_index_of: element index " +
                                std::to_string(element_index) + " out of range [0, " +
                                std::to_string(a.nnz()) + ")");
    return detail::row_of_element(a.row_offsets, element_index);
}

/// Splits the nonzeros into p chunks whose sizes are ceil or floor of nnz/p
/// (larger chunks first). Empty chunks appear at the tail when p > nnz.
template <class T>
ElementPartition partition_elements(const CsrMatrix<T>& a, int p) {
    if (p < 1) throw std::invalid_argument("partition_elements: need p >= 1");
    const Index nnz = a.nnz();
    const Index base = nnz / p;
    const Index extra = nnz % p;

    ElementPartition part;
    part.chunk_bounds.resize(p);
    part.row_of_chunk_start.resize(p);
    Index start = 0;
    for (int i = 0; i < p; ++i) {
        const Index size = base + (i < extra ? 1 : 0);
        part.chunk_bounds[i] = {start, start + size};
        part.row_of_chunk_start[i] =
            start < nnz ? detail::row_of_element(a.row_offsets, start) : a.num_rows;
        start += size;
    }
    return part;
}

}  // namespace spmmkit
