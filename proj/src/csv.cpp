#include "warpreg/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace warpreg {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CurveTable read_curves_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  CurveTable table;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("curve_id,t,", 0) != 0)
    fail(path, lineno, "expected header 'curve_id,t,<value>'");

  std::vector<double> grid, values;
  int current_id = 0;
  bool open = false;
  auto flush = [&]() {
    if (!open) return;
    try {
      table.curves.emplace_back(std::move(grid), std::move(values));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": curve " + std::to_string(current_id) + ": " + e.what());
    }
    table.ids.push_back(current_id);
    grid.clear();
    values.clear();
    open = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) fail(path, lineno, "expected 3 comma-separated fields");
    if (line.find(',', c2 + 1) != std::string::npos)
      fail(path, lineno, "expected 3 comma-separated fields");
    int id = 0;
    double t = 0.0, v = 0.0;
    try {
      std::size_t used = 0;
      std::string f0 = line.substr(0, c1);
      id = std::stoi(f0, &used);
      if (used != f0.size()) throw std::invalid_argument(f0);
      std::string f1 = line.substr(c1 + 1, c2 - c1 - 1);
      t = std::stod(f1, &used);
      if (used != f1.size()) throw std::invalid_argument(f1);
      std::string f2 = line.substr(c2 + 1);
      v = std::stod(f2, &used);
      if (used != f2.size()) throw std::invalid_argument(f2);
    } catch (const std::exception&) {
      fail(path, lineno, "unparseable row '" + line + "'");
    }
    if (!open || id != current_id) {
      for (int seen : table.ids)
        if (seen == id)
          fail(path, lineno, "curve " + std::to_string(id) + " rows are not contiguous");
      flush();
      current_id = id;
      open = true;
    }
    grid.push_back(t);
    values.push_back(v);
  }
  flush();
  if (table.curves.empty()) throw std::runtime_error(path + ": no data rows");
  return table;
}

void write_curves_csv(const std::string& path, const std::vector<int>& ids,
                      const std::vector<SampledCurve>& curves, const std::string& value_col) {
  if (ids.size() != curves.size())
    throw std::invalid_argument("write_curves_csv: ids/curves size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "curve_id,t," << value_col << "\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    for (std::size_t j = 0; j < c.size(); ++j)
      out << ids[i] << ',' << format_double(c.grid[j]) << ',' << format_double(c.values[j])
          << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace warpreg
