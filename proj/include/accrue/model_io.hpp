#pragma once

#include <string>

#include "accrue/pipeline.hpp"

namespace accrue {

/// Versioned structured-text model format. Fields appear in a fixed order
/// and doubles use 17 significant digits, so write -> read -> write is
/// byte-identical.
void save_model(const std::string& path, const CalibrationModel& model);
CalibrationModel load_model(const std::string& path);

}  // namespace accrue
