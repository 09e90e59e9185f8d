#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "spmmkit/types.hpp"

namespace spmmkit {

class MatrixMarketError : public std::runtime_error {
public:
    MatrixMarketError(const std::string& what, long line)
        : std::runtime_error("MatrixMarket parse error at line " + std::to_string(line) +
                             ": " + what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

namespace detail {

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool parse_index(const std::string& tok, Index& out) {
    std::size_t pos = 0;
    try {
        out = std::stoll(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

inline bool parse_value(const std::string& tok, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

}  // namespace detail

/// Reads MatrixMarket coordinate format (ASCII, 1-based indices).
/// field: real / integer / pattern; symmetry: general / symmetric.
/// Symmetric entries are mirrored, pattern entries get value 1, duplicate
/// coordinates are summed, rows come out sorted by column.
template <class T>
CsrMatrix<T> read_matrix_market(std::istream& in) {
    std::string line;
    long lineno = 0;

    if (!std::getline(in, line)) throw MatrixMarketError("empty input", 1);
    ++lineno;
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket")
        throw MatrixMarketError("missing %%MatrixMarket banner", lineno);
    object = detail::lower(object);
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (object != "matrix") throw MatrixMarketError("unsupported object '" + object + "'", lineno);
    if (format != "coordinate")
        throw MatrixMarketError("unsupported format '" + format + "' (coordinate only)", lineno);
    const bool pattern = field == "pattern";
    if (field != "real" && field != "integer" && !pattern)
        throw MatrixMarketError("unsupported field '" + field + "'", lineno);
    const bool symmetric = symmetry == "symmetric";
    if (symmetry != "general" && !symmetric)
        throw MatrixMarketError("unsupported symmetry '" + symmetry + "'", lineno);

    // Size line: first non-comment, non-blank line after the banner.
    Index nrows = -1, ncols = -1, declared = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        std::string a, b, c, extra;
        ls >> a >> b >> c;
        if (ls >> extra) throw MatrixMarketError("trailing tokens on size line", lineno);
        if (!detail::parse_index(a, nrows) || !detail::parse_index(b, ncols) ||
            !detail::parse_index(c, declared))
            throw MatrixMarketError("malformed size line '" + line + "'", lineno);
        break;
    }
    if (declared < 0) throw MatrixMarketError("missing size line", lineno);
    if (nrows < 0 || ncols < 0) throw MatrixMarketError("negative dimension", lineno);

    std::vector<std::tuple<Index, Index, T>> triplets;
    triplets.reserve(static_cast<std::size_t>(declared) * (symmetric ? 2 : 1));
    Index seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        if (seen == declared)
            throw MatrixMarketError("more entries than the declared " +
                                        std::to_string(declared),
                                    lineno);
        std::istringstream ls(line);
        std::string ri, ci, vi;
        ls >> ri >> ci;
        Index r = 0, c = 0;
        if (!detail::parse_index(ri, r) || !detail::parse_index(ci, c))
            throw MatrixMarketError("malformed entry '" + line + "'", lineno);
        double v = 1.0;
        if (!pattern) {
            ls >> vi;
            if (vi.empty() || !detail::parse_value(vi, v))
                throw MatrixMarketError("non-numeric value in entry '" + line + "'", lineno);
        }
        if (r < 1 || r > nrows)
            throw MatrixMarketError("row index " + std::to_string(r) + " out of bounds", lineno);
        if (c < 1 || c > ncols)
            throw MatrixMarketError("col index " + std::to_string(c) + " out of bounds", lineno);
        triplets.emplace_back(r - 1, c - 1, static_cast<T>(v));
        if (symmetric && r != c) triplets.emplace_back(c - 1, r - 1, static_cast<T>(v));
        ++seen;
    }
    if (seen != declared)
        throw MatrixMarketError("file declares " + std::to_string(declared) +
                                    " entries but contains " + std::to_string(seen),
                                lineno);

    return CsrMatrix<T>::from_coo(nrows, ncols, std::move(triplets));
}

template <class T>
CsrMatrix<T> read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    return read_matrix_market<T>(in);
}

/// Writes coordinate/real/general with enough digits for an exact value
/// roundtrip.
template <class T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.num_rows << ' ' << m.num_cols << ' ' << m.nnz() << '\n';
    out.precision(std::numeric_limits<T>::max_digits10);
    for (Index r = 0; r < m.num_rows; ++r)
        for (Index i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
            out << r + 1 << ' ' << m.col_indices[i] + 1 << ' ' << m.values[i] << '\n';
}

template <class T>
void write_matrix_market_file(const std::string& path, const CsrMatrix<T>& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_matrix_market(out, m);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace spmmkit
