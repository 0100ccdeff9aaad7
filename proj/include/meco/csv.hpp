#pragma once

// CSV form of sweep rows. Header (fixed):
//   sweep_variable,sweep_value,scheme,status,reference_only,total_energy_J,
//   rel_gap,iterations,wall_time_s,user_energies_J,message
// Floats use the shortest decimal that reads back to the same double;
// infeasible energies print as "inf". user_energies_J joins the per-user
// values with ';'. Fields containing ',', '"' or a line break are quoted with
// doubled inner quotes.

#include <iosfwd>
#include <string>
#include <vector>

#include "meco/sweep.hpp"

namespace meco {

inline constexpr const char* kCsvHeader =
    "sweep_variable,sweep_value,scheme,status,reference_only,total_energy_J,rel_gap,iterations,wall_time_s,"
    "user_energies_J,message";

std::string format_double(double v);
double parse_double(const std::string& s);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& is);

// File variants; I/O errors are thrown as std::runtime_error naming the path.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> parse_csv(const std::string& path);

}  // namespace meco
