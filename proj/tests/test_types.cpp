#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace spmmkit;

TEST(CsrValidate, EmptyMatrixIsValid) {
    CsrMatrix<double> m;  // M=0, nnz=0, row_offsets=[0]
    EXPECT_TRUE(validate(m).empty());
}

TEST(CsrValidate, NondecreasingViolationNamesIndex) {
    CsrMatrix<double> m;
    m.num_rows = 2;
    m.num_cols = 3;
    m.row_offsets = {0, 2, 1};
    m.col_indices = {0, 1};
    m.values = {1.0, 2.0};
    const auto issues = validate(m);
    ASSERT_FALSE(issues.empty());
    bool found = false;
    for (const auto& s : issues)
        if (s.find("nondecreasing") != std::string::npos && s.find("2") != std::string::npos)
            found = true;
    EXPECT_TRUE(found) << "expected a nondecreasing violation naming index 2";
}

TEST(CsrValidate, ColumnBoundViolation) {
    CsrMatrix<double> m;
    m.num_rows = 1;
    m.num_cols = 3;
    m.row_offsets = {0, 1};
    m.col_indices = {3};  // == K, out of bounds
    m.values = {1.0};
    const auto issues = validate(m);
    ASSERT_FALSE(issues.empty());
    EXPECT_NE(issues[0].find("col index bound"), std::string::npos);
}

TEST(CsrValidate, LengthMismatchReported) {
    CsrMatrix<double> m;
    m.num_rows = 1;
    m.num_cols = 2;
    m.row_offsets = {0, 1};
    m.col_indices = {0};
    m.values = {1.0, 2.0};
    EXPECT_FALSE(validate(m).empty());
}

TEST(CsrValidate, DuplicateColumnsInRowCaught) {
    CsrMatrix<double> m;
    m.num_rows = 1;
    m.num_cols = 4;
    m.row_offsets = {0, 2};
    m.col_indices = {1, 1};
    m.values = {1.0, 1.0};
    const auto issues = validate(m);
    ASSERT_FALSE(issues.empty());
    EXPECT_NE(issues[0].find("strictly increasing"), std::string::npos);
}

TEST(CsrFromCoo, SortsAndSumsDuplicates) {
    const auto m = CsrMatrix<double>::from_coo(
        2, 3, {{1, 2, 4.0}, {0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}});
    EXPECT_TRUE(is_valid(m));
    EXPECT_EQ(m.nnz(), 3);
    EXPECT_EQ(m.row_offsets, (std::vector<Index>{0, 1, 3}));
    EXPECT_EQ(m.col_indices, (std::vector<Index>{1, 0, 2}));
    EXPECT_EQ(m.values, (std::vector<double>{3.0, 3.0, 4.0}));
}

TEST(CsrFromCoo, OutOfBoundsThrows) {
    EXPECT_THROW(CsrMatrix<double>::from_coo(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(CsrMatrix<double>::from_coo(2, 2, {{0, -1, 1.0}}), std::invalid_argument);
}

TEST(CsrMatrixBasics, IdentityAndRowNnz) {
    const auto m = CsrMatrix<double>::identity(4);
    EXPECT_TRUE(is_valid(m));
    EXPECT_EQ(m.nnz(), 4);
    for (Index i = 0; i < 4; ++i) {
        EXPECT_EQ(m.row_nnz(i), 1);
        EXPECT_EQ(m.col_indices[i], i);
        EXPECT_EQ(m.values[i], 1.0);
    }
}

TEST(DenseMatrix, IndexOfMatchesLayoutContract) {
    DenseMatrix<double> rm(2, 3, Layout::RowMajor);
    DenseMatrix<double> cm(2, 3, Layout::ColMajor);
    for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 3; ++c) {
            EXPECT_EQ(rm.index_of(r, c), static_cast<std::size_t>(r * 3 + c));
            EXPECT_EQ(cm.index_of(r, c), static_cast<std::size_t>(c * 2 + r));
        }
}

TEST(DenseMatrix, ConvertLayoutExample) {
    // RowMajor 2x3 [1..6] must become ColMajor [1,4,2,5,3,6].
    DenseMatrix<double> rm(2, 3, Layout::RowMajor);
    rm.data = {1, 2, 3, 4, 5, 6};
    const auto cm = convert_layout(rm, Layout::ColMajor);
    EXPECT_EQ(cm.layout, Layout::ColMajor);
    EXPECT_EQ(cm.data, (std::vector<double>{1, 4, 2, 5, 3, 6}));

    const auto back = convert_layout(cm, Layout::RowMajor);
    EXPECT_EQ(back.data, rm.data);
}

TEST(DenseMatrix, ConvertToSameLayoutIsIdentity) {
    DenseMatrix<double> rm(2, 2, Layout::RowMajor);
    rm.data = {1, 2, 3, 4};
    EXPECT_EQ(convert_layout(rm, Layout::RowMajor).data, rm.data);
}

TEST(DenseMatrix, SingleRowSameDataEitherLayout) {
    DenseMatrix<double> rm(1, 5, Layout::RowMajor);
    for (Index c = 0; c < 5; ++c) rm.at(0, c) = static_cast<double>(c);
    EXPECT_EQ(convert_layout(rm, Layout::ColMajor).data, rm.data);
}

TEST(DenseMatrix, RandomSameSeedSameLogicalContentAcrossLayouts) {
    const auto a = DenseMatrix<double>::random(5, 7, Layout::RowMajor, 123);
    const auto b = DenseMatrix<double>::random(5, 7, Layout::ColMajor, 123);
    for (Index r = 0; r < 5; ++r)
        for (Index c = 0; c < 7; ++c) EXPECT_EQ(a.at(r, c), b.at(r, c));
}

TEST(DenseMatrix, ConvertLayoutIsInvolution) {
    const auto a = DenseMatrix<double>::random(4, 6, Layout::RowMajor, 9);
    const auto twice = convert_layout(convert_layout(a, Layout::ColMajor), Layout::RowMajor);
    EXPECT_EQ(twice.data, a.data);
    EXPECT_EQ(twice.layout, a.layout);
}
