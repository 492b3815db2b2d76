#include "allee/io/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace allee::io {

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("table '" + schema + "': row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

bool is_number(std::string_view s) {
  if (s == "nan" || s == "inf" || s == "-inf") return true;
  double v;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return !s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size();
}

void write_field(std::ostream& os, const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

struct Field {
  std::string text;
  bool quoted = false;
};

std::vector<Field> split_record(const std::string& line) {
  std::vector<Field> out(1);
  bool inq = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    Field& f = out.back();
    if (inq) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        f.text += '"';
        ++i;
      } else if (c == '"') {
        inq = false;
      } else {
        f.text += c;
      }
    } else if (c == '"') {
      inq = f.quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      f.text += c;
    }
  }
  if (inq) throw std::runtime_error("csv: unterminated quote");
  return out;
}

}  // namespace

void write_csv(const ResultTable& t, std::ostream& os) {
  os << "# schema: " << t.schema << " v" << t.schema_version << '\n';
  os << "# config_hash: " << t.config_hash << '\n';
  os << "# toolkit: allee-patch " << t.toolkit_version << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) os << ',';
    write_field(os, t.columns[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      if (const double* d = std::get_if<double>(&row[i])) {
        os << format_double(*d);
      } else {
        const auto& s = std::get<std::string>(row[i]);
        // Text that would re-parse as a number is quoted to keep its type.
        if (is_number(s)) {
          os << '"' << s << '"';
        } else {
          write_field(os, s);
        }
      }
    }
    os << '\n';
  }
}

void write_csv_file(const ResultTable& t, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_csv(t, f);
  f.flush();
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ResultTable read_csv(std::istream& is) {
  ResultTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2), val = line.substr(colon + 2);
      if (key == "schema") {
        const auto v = val.rfind(" v");
        t.schema = val.substr(0, v);
        if (v != std::string::npos) t.schema_version = std::stoi(val.substr(v + 2));
      } else if (key == "config_hash") {
        t.config_hash = val;
      } else if (key == "toolkit") {
        const auto sp = val.rfind(' ');
        t.toolkit_version = sp == std::string::npos ? val : val.substr(sp + 1);
      }
      continue;
    }
    const std::vector<Field> fields = split_record(line);
    if (!header) {
      for (const Field& f : fields) t.columns.push_back(f.text);
      header = true;
      continue;
    }
    std::vector<Cell> row;
    for (const Field& f : fields) {
      if (!f.quoted && is_number(f.text))
        row.emplace_back(parse_double(f.text));
      else
        row.emplace_back(f.text);
    }
    t.add_row(std::move(row));
  }
  if (!header) throw std::runtime_error("csv: missing header row");
  return t;
}

ResultTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path.string() + "'");
  return read_csv(f);
}

}  // namespace allee::io
