#include "multigibbs/table.hpp"

#include "multigibbs/errors.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace multigibbs {

namespace {

void write_file(const std::string &path, const std::string &text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::string quote_csv(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + '"';
}

std::string plot_token(const std::string &s) {
    if (s.empty()) {
        return "\"\"";
    }
    if (s.find_first_of(" \t\"") == std::string::npos) {
        return s;
    }
    return '"' + s + '"';
}

} // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw DomainError("Table: row width differs from the header");
    }
    rows.push_back(std::move(row));
}

std::string format_real(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_cell(const Cell &c) {
    if (const auto *d = std::get_if<double>(&c)) {
        return format_real(*d);
    }
    if (const auto *i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    return std::get<std::string>(c);
}

std::string to_csv(const Table &t) {
    std::string out;
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        out += (j ? "," : "") + quote_csv(t.columns[j]);
    }
    out += '\n';
    for (const auto &row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            out += (j ? "," : "") + quote_csv(format_cell(row[j]));
        }
        out += '\n';
    }
    return out;
}

std::string to_plotdata(const Table &t) {
    std::string out = "#";
    for (const auto &c : t.columns) {
        out += ' ' + plot_token(c);
    }
    out += '\n';
    for (const auto &row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            out += (j ? " " : "") + plot_token(format_cell(row[j]));
        }
        out += '\n';
    }
    return out;
}

void emit_csv(const Table &t, const std::string &path) { write_file(path, to_csv(t)); }

void emit_plotdata(const Table &t, const std::string &path) { write_file(path, to_plotdata(t)); }

} // namespace multigibbs
