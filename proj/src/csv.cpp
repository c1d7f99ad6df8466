#include "fbip/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fbip/errors.hpp"

namespace fbip {

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf, end);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
        throw IoError("parse_double: cannot parse '" + text + "'");
    return v;
}

std::vector<std::string> trajectory_columns(int n_modes) {
    std::vector<std::string> cols;
    cols.push_back("t");
    auto coords = [&](const std::string& prefix) {
        cols.push_back(prefix + "X");
        cols.push_back(prefix + "Y");
        cols.push_back(prefix + "phi");
        cols.push_back(prefix + "theta1");
        cols.push_back(prefix + "theta2");
        for (int i = 1; i <= n_modes; ++i) cols.push_back(prefix + "q1_" + std::to_string(i));
        for (int i = 1; i <= n_modes; ++i) cols.push_back(prefix + "q2_" + std::to_string(i));
    };
    coords("");
    coords("d");
    for (const char* name : {"w1_tip", "w2_tip", "Fs", "tau1", "tau2", "Va1", "Va2", "v1", "v2"})
        cols.push_back(name);
    return cols;
}

void export_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
    if (!out) throw IoError("export_csv: cannot open '" + path + "' for writing");

    const auto cols = trajectory_columns(traj.n_modes);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";

    const int dim = 5 + 2 * traj.n_modes;
    for (std::size_t row = 0; row < traj.size(); ++row) {
        out << format_double(traj.times[row]);
        for (int k = 0; k < dim; ++k) out << "," << format_double(traj.pos[row][k]);
        for (int k = 0; k < dim; ++k) out << "," << format_double(traj.vel[row][k]);
        out << "," << format_double(traj.w1_tip[row]) << "," << format_double(traj.w2_tip[row])
            << "," << format_double(traj.Fs[row]) << "," << format_double(traj.tau1[row]) << ","
            << format_double(traj.tau2[row]) << "," << format_double(traj.Va1[row]) << ","
            << format_double(traj.Va2[row]) << "," << format_double(traj.v1[row]) << ","
            << format_double(traj.v2[row]);
        out << "\n";
    }
    if (!out) throw IoError("export_csv: write failure on '" + path + "'");
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0) throw IoError("CSV column '" + name + "' not found");
    return columns[static_cast<std::size_t>(idx)];
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_csv: cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    table.columns.assign(table.header.size(), {});

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::size_t col = 0;
        while (std::getline(rs, cell, ',')) {
            if (col >= table.columns.size())
                throw IoError("read_csv: " + path + ":" + std::to_string(lineno) +
                              ": more cells than header columns");
            table.columns[col].push_back(parse_double(cell));
            ++col;
        }
        if (col != table.columns.size())
            throw IoError("read_csv: " + path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.columns.size()) + " cells, got " +
                          std::to_string(col));
    }
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_csv: cannot open '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << "\n";
    }
    if (!out) throw IoError("write_csv: write failure on '" + path + "'");
}

}  // namespace fbip
