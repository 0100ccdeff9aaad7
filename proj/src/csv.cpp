#include "meco/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace meco {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Reads one record; false at end of input.
bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool quoted = false;
  for (int c; (c = is.get()) != std::char_traits<char>::eof();) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          cur += '"';
          is.get();
        } else {
          quoted = false;
        }
      } else {
        cur += static_cast<char>(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += static_cast<char>(c);
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  fields.push_back(std::move(cur));
  return true;
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error("csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error("csv: bad number '" + s + "'");
  return v;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    std::string users;
    for (std::size_t u = 0; u < r.user_energies_J.size(); ++u) {
      if (u) users += ';';
      users += format_double(r.user_energies_J[u]);
    }
    os << quote(r.sweep_variable) << ',' << format_double(r.sweep_value) << ',' << quote(r.scheme) << ','
       << quote(r.status) << ',' << (r.reference_only ? 1 : 0) << ',' << format_double(r.total_energy_J) << ','
       << format_double(r.rel_gap) << ',' << r.iterations << ',' << format_double(r.wall_time_s) << ',' << users
       << ',' << quote(r.message) << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& is) {
  std::vector<std::string> f;
  if (!read_record(is, f)) throw std::runtime_error("csv: missing header");
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  if (header != kCsvHeader) throw std::runtime_error("csv: unexpected header '" + header + "'");

  std::vector<SweepRow> rows;
  std::size_t line = 1;
  while (read_record(is, f)) {
    ++line;
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 11)
      throw std::runtime_error("csv: record " + std::to_string(line) + " has " + std::to_string(f.size()) +
                               " fields, expected 11");
    SweepRow r;
    r.sweep_variable = f[0];
    r.sweep_value = parse_double(f[1]);
    r.scheme = f[2];
    r.status = f[3];
    r.reference_only = f[4] == "1";
    r.total_energy_J = parse_double(f[5]);
    r.rel_gap = parse_double(f[6]);
    r.iterations = parse_size(f[7]);
    r.wall_time_s = parse_double(f[8]);
    for (std::size_t pos = 0; !f[9].empty();) {
      const auto next = f[9].find(';', pos);
      r.user_energies_J.push_back(parse_double(f[9].substr(pos, next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    r.message = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  write_csv(os, rows);
  os.flush();
  if (!os) throw std::runtime_error(path + ": write failed");
}

std::vector<SweepRow> parse_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(path + ": cannot open");
  try {
    return read_csv(is);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace meco
