#ifndef MULTIGIBBS_TABLE_HPP
#define MULTIGIBBS_TABLE_HPP

#include <string>
#include <variant>
#include <vector>

namespace multigibbs {

using Cell = std::variant<double, long long, std::string>;

/// Column-named rows; cells are reals, integers or text.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit Table(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}
    /// Appends a row; throws DomainError on a width mismatch.
    void add(std::vector<Cell> row);
};

/// 17 significant digits, locale-independent.
std::string format_real(double x);
std::string format_cell(const Cell &c);

std::string to_csv(const Table &t);
/// Whitespace-separated columns with a '#' header line (gnuplot-compatible).
std::string to_plotdata(const Table &t);

/// Write to path, creating parent directories. Throws std::runtime_error on I/O failure.
void emit_csv(const Table &t, const std::string &path);
void emit_plotdata(const Table &t, const std::string &path);

} // namespace multigibbs

#endif // MULTIGIBBS_TABLE_HPP
