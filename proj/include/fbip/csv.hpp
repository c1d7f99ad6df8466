#pragma once

#include <string>
#include <vector>

#include "fbip/integrator.hpp"

namespace fbip {

// Shortest decimal text that parses back to the same double (to_chars).
std::string format_double(double v);
double parse_double(const std::string& text);

// Trajectory CSV contract: header then one row per record,
//   t, X, Y, phi, theta1, theta2, q1_*, q2_*, d<same...>, w1_tip, w2_tip,
//   Fs, tau1, tau2, Va1, Va2, v1, v2
// full-precision round-trip values, comma separated, LF line endings.
std::vector<std::string> trajectory_columns(int n_modes);
void export_csv(const Trajectory& traj, const std::string& path);

// Generic column-oriented CSV reader (header required, numeric cells).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    int column_index(const std::string& name) const;  // -1 when absent
    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace fbip
