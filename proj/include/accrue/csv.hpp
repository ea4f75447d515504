#pragma once

#include <iosfwd>
#include <string>

#include "accrue/dataset.hpp"

namespace accrue {

/// 17-significant-digit decimal form; round-trips any finite double.
std::string format_double(double v);

/// Reads a data file with mandatory header `x_1,...,x_d,m,y` (d >= 1).
/// Errors name the offending line; non-finite values are rejected.
Dataset read_data_csv(const std::string& path);

/// Writes the matching format. write(read(f)) is byte-identical for files
/// this writer produced.
void write_data_csv(std::ostream& out, const Dataset& data);
void write_data_csv(const std::string& path, const Dataset& data);

}  // namespace accrue
