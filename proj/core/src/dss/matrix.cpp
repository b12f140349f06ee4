#include "mcdist/dss/matrix.hpp"

#include <string>

#include "mcdist/common/errors.hpp"
#include "mcdist/dss/rpn.hpp"
#include "mcdist/dss/statement.hpp"

namespace mcdist::dss {

namespace {

std::vector<std::vector<double>> split_rows(std::string_view expr) {
    std::string_view body = strip_delimiters(expr);
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (true) {
        auto bar = body.find('|', start);
        std::string_view piece = body.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
        std::vector<double> row;
        for (const auto& item : split_items(piece)) {
            try {
                row.push_back(parse_number(item));
            } catch (const ParseError&) {
                throw ParseError("non-numeric matrix entry '" + item + "' in '" + std::string(expr) + "'");
            }
        }
        rows.push_back(std::move(row));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return rows;
}

bool rows_match(const std::vector<std::vector<double>>& rows, std::size_t n, int pattern) {
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t want = pattern == 0 ? i + 1 : pattern == 1 ? n - i : n;
        if (rows[i].size() != want) return false;
    }
    return true;
}

}  // namespace

std::size_t matrix_row_count(std::string_view expr) {
    std::string_view body = strip_delimiters(expr);
    std::size_t count = 1;
    for (char c : body) count += c == '|';
    return count;
}

SymMatrix parse_matrix(std::string_view expr, std::size_t n) {
    if (n == 0) throw ParseError("matrix size must be positive");
    auto rows = split_rows(expr);
    SymMatrix m(n);

    if (rows.size() == 1 && n > 1) {
        const auto& flat = rows.front();
        if (flat.size() == n * n) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) m.set(i, j, flat[i * n + j]);
            return m;
        }
        if (flat.size() == n * (n + 1) / 2) {
            std::size_t k = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j) m.set(i, j, flat[k++]);
            return m;
        }
        throw ParseError("matrix '" + std::string(expr) + "' has " + std::to_string(flat.size()) +
                         " entries; expected " + std::to_string(n * n) + " or " + std::to_string(n * (n + 1) / 2));
    }

    if (rows.size() != n) {
        throw ParseError("matrix '" + std::string(expr) + "' has " + std::to_string(rows.size()) +
                         " rows; expected " + std::to_string(n));
    }
    if (rows_match(rows, n, 0)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m.set(i, j, rows[i][j]);
    } else if (rows_match(rows, n, 1)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n - i; ++k) m.set(i, i + k, rows[i][k]);
    } else if (rows_match(rows, n, 2)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m.set(i, j, rows[i][j]);
    } else {
        throw ParseError("matrix '" + std::string(expr) +
                         "' rows fit neither a triangular nor a full pattern of size " + std::to_string(n));
    }
    return m;
}

}  // namespace mcdist::dss
