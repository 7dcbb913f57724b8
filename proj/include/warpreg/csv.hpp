#pragma once

#include <string>
#include <vector>

#include "warpreg/curve.hpp"

namespace warpreg {

/// Curves in long-format CSV: one (curve_id, t, value) row per sample,
/// header row, comma separator, '.' decimal, LF endings. Values are written
/// with 17 significant digits so a read-back is lossless.
struct CurveTable {
  std::vector<int> ids;              // distinct curve ids, file order
  std::vector<SampledCurve> curves;  // parallel to ids
};

std::string format_double(double v);

/// Parses a long-format file. The third column may carry any name; rows of a
/// curve must appear contiguously with increasing t. Throws std::runtime_error
/// with the offending line number on malformed input.
CurveTable read_curves_csv(const std::string& path);

void write_curves_csv(const std::string& path, const std::vector<int>& ids,
                      const std::vector<SampledCurve>& curves,
                      const std::string& value_col = "value");

}  // namespace warpreg
