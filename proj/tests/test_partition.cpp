#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace spmmkit;

namespace {

std::vector<Index> chunk_sizes(const ElementPartition& p) {
    std::vector<Index> out;
    for (const auto& c : p.chunk_bounds) out.push_back(c.size());
    return out;
}

/// Row of element `e` by linear scan over row_offsets — the slow oracle.
Index row_by_scan(const CsrMatrix<double>& m, Index e) {
    for (Index r = 0; r < m.num_rows; ++r)
        if (e >= m.row_offsets[r] && e < m.row_offsets[r + 1]) return r;
    return m.num_rows;
}

}  // namespace

TEST(Partition, TenElementsFourWorkers) {
    const auto m = tutil::matrix_with_row_counts({4, 3, 3}, 4);  // nnz = 10
    const auto p = partition_elements(m, 4);
    EXPECT_EQ(chunk_sizes(p), (std::vector<Index>{3, 3, 2, 2}));
    EXPECT_EQ(p.chunk_bounds[0].begin, 0);
    EXPECT_EQ(p.chunk_bounds[3].end, 10);
}

TEST(Partition, ChunkStartsMapToRows) {
    const auto m = tutil::matrix_with_row_counts({3, 3}, 4);  // offsets [0, 3, 6]
    const auto p = partition_elements(m, 2);
    EXPECT_EQ(p.row_of_chunk_start, (std::vector<Index>{0, 1}));
}

TEST(Partition, UnevenRowsVsScan) {
    const auto m = tutil::matrix_with_row_counts({5, 1}, 8);  // nnz = 6
    const auto p = partition_elements(m, 3);
    EXPECT_EQ(chunk_sizes(p), (std::vector<Index>{2, 2, 2}));
    for (std::size_t i = 0; i < p.chunk_bounds.size(); ++i)
        EXPECT_EQ(p.row_of_chunk_start[i], row_by_scan(m, p.chunk_bounds[i].begin));
}

TEST(Partition, MoreWorkersThanElements) {
    const auto m = tutil::matrix_with_row_counts({1, 1}, 2);  // nnz = 2
    const auto p = partition_elements(m, 5);
    EXPECT_EQ(chunk_sizes(p), (std::vector<Index>{1, 1, 0, 0, 0}));
    // Empty trailing chunks report row == num_rows.
    EXPECT_EQ(p.row_of_chunk_start[2], m.num_rows);
    EXPECT_EQ(p.row_of_chunk_start[4], m.num_rows);
}

TEST(Partition, RejectsNonPositiveWorkerCount) {
    const auto m = tutil::matrix_with_row_counts({1}, 1);
    EXPECT_THROW(partition_elements(m, 0), std::invalid_argument);
    EXPECT_THROW(partition_elements(m, -2), std::invalid_argument);
}

TEST(Partition, ExhaustiveDisjointCover) {
    // Every (shape, p) combination up to nnz 32 and P 8: the chunks must be
    // contiguous, disjoint, cover [0, nnz), and differ in size by at most 1.
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const Index rows = 1 + static_cast<Index>(rng() % 6);
        std::vector<Index> counts;
        Index nnz = 0;
        for (Index r = 0; r < rows; ++r) {
            counts.push_back(static_cast<Index>(rng() % 7));
            nnz += counts.back();
        }
        const auto m = tutil::matrix_with_row_counts(counts, 8);
        ASSERT_EQ(m.nnz(), nnz);
        for (int p = 1; p <= 8; ++p) {
            const auto part = partition_elements(m, p);
            ASSERT_EQ(part.chunk_bounds.size(), static_cast<std::size_t>(p));
            Index cursor = 0;
            Index max_size = 0, min_size = nnz + 1;
            for (int i = 0; i < p; ++i) {
                const auto& c = part.chunk_bounds[i];
                ASSERT_EQ(c.begin, cursor);
                ASSERT_LE(c.begin, c.end);
                cursor = c.end;
                max_size = std::max(max_size, c.size());
                min_size = std::min(min_size, c.size());
                const Index want_row =
                    c.begin < nnz ? row_by_scan(m, c.begin) : m.num_rows;
                ASSERT_EQ(part.row_of_chunk_start[i], want_row);
            }
            ASSERT_EQ(cursor, nnz);
            ASSERT_LE(max_size - min_size, 1);
        }
    }
}

TEST(RowIndexOf, SpecOffsets) {
    // offsets [0, 2, 2, 5]: rows of 2/0/3 nonzeros.
    const auto m = tutil::matrix_with_row_counts({2, 0, 3}, 4);
    EXPECT_EQ(row_index_of(m, 0), 0);
    EXPECT_EQ(row_index_of(m, 1), 0);
    EXPECT_EQ(row_index_of(m, 2), 2);  // row 1 is empty
    EXPECT_EQ(row_index_of(m, 4), 2);
}

TEST(RowIndexOf, MatchesScanOnRandomMatrices) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto m = tutil::random_csr(12, 9, 40, seed);
        for (Index e = 0; e < m.nnz(); ++e)
            ASSERT_EQ(row_index_of(m, e), row_by_scan(m, e)) << "element " << e;
    }
}

TEST(RowIndexOf, OutOfRangeThrows) {
    const auto m = tutil::matrix_with_row_counts({2, 1}, 4);
    EXPECT_THROW(row_index_of(m, -1), std::out_of_range);
    EXPECT_THROW(row_index_of(m, 3), std::out_of_range);
}

TEST(KernelIdMap, CanonicalIndexRoundtrip) {
    const char* names[8] = {"RB+RM+SR", "RB+RM+PR", "RB+CM+SR", "RB+CM+PR",
                            "EB+RM+SR", "EB+RM+PR", "EB+CM+SR", "EB+CM+PR"};
    for (int i = 0; i < kNumKernels; ++i) {
        const auto id = KernelId::from_index(i);
        EXPECT_EQ(id.index(), i);
        EXPECT_EQ(id.name(), names[i]);
        const auto parsed = KernelId::parse(names[i]);
        ASSERT_TRUE(parsed.has_value());
        EXPECT_EQ(parsed->index(), i);
    }
    EXPECT_THROW(KernelId::from_index(8), std::out_of_range);
    EXPECT_FALSE(KernelId::parse("RB+XX+SR").has_value());
    EXPECT_FALSE(KernelId::parse("RBRMSR").has_value());
}

TEST(KernelIdMap, ProjectLabel) {
    const auto id = KernelId::from_index(5);  // EB+RM+PR
    EXPECT_EQ(project_label(id, 0), 1);
    EXPECT_EQ(project_label(id, 1), 0);
    EXPECT_EQ(project_label(id, 2), 1);
    EXPECT_THROW(project_label(id, 3), std::out_of_range);
}
