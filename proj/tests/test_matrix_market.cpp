#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

using namespace spmmkit;

namespace {

CsrMatrix<double> parse(const std::string& text) {
    std::istringstream in(text);
    return read_matrix_market<double>(in);
}

}  // namespace

TEST(MatrixMarketRead, TwoByTwoCoordinate) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 3.0\n"
        "2 2 4.0\n");
    EXPECT_EQ(m.num_rows, 2);
    EXPECT_EQ(m.num_cols, 2);
    EXPECT_EQ(m.row_offsets, (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(m.values, (std::vector<double>{3.0, 4.0}));
}

TEST(MatrixMarketRead, SymmetricMirrorsOffDiagonal) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 1\n"
        "2 1 5.0\n");
    ASSERT_EQ(m.nnz(), 2);
    // Both (1,0) and (0,1), value 5.0, 0-based.
    EXPECT_EQ(m.col_indices, (std::vector<Index>{1, 0}));
    EXPECT_EQ(m.values, (std::vector<double>{5.0, 5.0}));
}

TEST(MatrixMarketRead, SymmetricDiagonalNotDoubled) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 2\n"
        "1 1 2.0\n"
        "2 1 5.0\n");
    EXPECT_EQ(m.nnz(), 3);
    EXPECT_EQ(spmm_reference(m, DenseMatrix<double>::random(2, 1, Layout::RowMajor, 1)).num_rows,
              2);
}

TEST(MatrixMarketRead, PatternEntriesGetValueOne) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate pattern general\n"
        "2 3 2\n"
        "1 2\n"
        "2 3\n");
    EXPECT_EQ(m.values, (std::vector<double>{1.0, 1.0}));
}

TEST(MatrixMarketRead, DuplicateCoordinatesAreSummed) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n"
        "1 2 2\n"
        "1 1 1.5\n"
        "1 1 2.0\n");
    EXPECT_EQ(m.nnz(), 1);
    EXPECT_EQ(m.values[0], 3.5);
}

TEST(MatrixMarketRead, FewerEntriesThanDeclaredIsError) {
    try {
        parse(
            "%%MatrixMarket matrix coordinate real general\n"
            "3 3 3\n"
            "1 1 1.0\n"
            "2 2 2.0\n");
        FAIL() << "expected MatrixMarketError";
    } catch (const MatrixMarketError& e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
}

TEST(MatrixMarketRead, MoreEntriesThanDeclaredIsError) {
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n"
                       "2 2 1\n"
                       "1 1 1.0\n"
                       "2 2 2.0\n"),
                 MatrixMarketError);
}

TEST(MatrixMarketRead, MalformedHeaderNamesLine) {
    try {
        parse("%%NotMatrixMarket whatever\n1 1 1\n1 1 1.0\n");
        FAIL() << "expected MatrixMarketError";
    } catch (const MatrixMarketError& e) {
        EXPECT_EQ(e.line(), 1);
    }
}

TEST(MatrixMarketRead, NonNumericValueNamesLine) {
    try {
        parse(
            "%%MatrixMarket matrix coordinate real general\n"
            "2 2 2\n"
            "1 1 3.0\n"
            "2 2 oops\n");
        FAIL() << "expected MatrixMarketError";
    } catch (const MatrixMarketError& e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
    }
}

TEST(MatrixMarketRead, IndexOutOfDeclaredBoundsIsError) {
    EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n"
                       "2 2 1\n"
                       "3 1 1.0\n"),
                 MatrixMarketError);
}

TEST(MatrixMarketRead, CommentsAndBlankLinesSkipped) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate real general\n"
        "% a comment\n"
        "\n"
        "2 2 1\n"
        "% another\n"
        "1 2 7.0\n");
    EXPECT_EQ(m.nnz(), 1);
    EXPECT_EQ(m.col_indices[0], 1);
}

TEST(MatrixMarketRoundtrip, ExactForRandomMatrix) {
    const auto m = tutil::random_csr(17, 13, 60, 99);
    std::ostringstream os;
    write_matrix_market(os, m);
    std::istringstream is(os.str());
    const auto back = read_matrix_market<double>(is);
    EXPECT_EQ(back.num_rows, m.num_rows);
    EXPECT_EQ(back.num_cols, m.num_cols);
    EXPECT_EQ(back.row_offsets, m.row_offsets);
    EXPECT_EQ(back.col_indices, m.col_indices);
    EXPECT_EQ(back.values, m.values);  // bit-exact via max_digits10
}

TEST(MatrixMarketRoundtrip, SymmetricAndPatternFixtures) {
    // Parse fixtures, write them back out (as general/real), re-read, and
    // require identical structure and values.
    const std::vector<std::string> fixtures = {
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "3 3 3\n"
        "1 1 1.5\n"
        "2 1 -2.0\n"
        "3 2 0.25\n",
        "%%MatrixMarket matrix coordinate pattern general\n"
        "4 4 5\n"
        "1 1\n1 4\n2 2\n3 1\n4 3\n",
        "%%MatrixMarket matrix coordinate pattern symmetric\n"
        "3 3 2\n"
        "2 1\n3 3\n",
    };
    for (const auto& text : fixtures) {
        const auto m = parse(text);
        ASSERT_TRUE(is_valid(m));
        std::ostringstream os;
        write_matrix_market(os, m);
        std::istringstream is(os.str());
        const auto back = read_matrix_market<double>(is);
        EXPECT_EQ(back.row_offsets, m.row_offsets);
        EXPECT_EQ(back.col_indices, m.col_indices);
        EXPECT_EQ(back.values, m.values);
    }
}

TEST(MatrixMarketFiles, FileWrappersRoundtrip) {
    const auto m = tutil::random_csr(9, 9, 25, 3);
    const auto path = testing::TempDir() + "mm_roundtrip.mtx";
    write_matrix_market_file(path, m);
    const auto back = read_matrix_market_file<double>(path);
    EXPECT_EQ(back.values, m.values);
    std::remove(path.c_str());
}

TEST(MatrixMarketRead, IntegerFieldAccepted) {
    const auto m = parse(
        "%%MatrixMarket matrix coordinate integer general\n"
        "2 2 1\n"
        "1 2 7\n");
    EXPECT_EQ(m.values[0], 7.0);
}
