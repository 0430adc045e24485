#pragma once

#include <string>

#include "fkfpe/grid.hpp"

namespace fkfpe {

/// Binary density format: magic "FKFP", version u32, then N_x, N_v, L_x, L_v
/// as little-endian 64-bit floats, then row-major (x-major) f64 cell values.
void save_density(const DensityGrid& f, const std::string& path);
DensityGrid load_density(const std::string& path);

/// CSV export, one "x,v,value" row per cell, with a comment header.
void save_density_csv(const DensityGrid& f, const std::string& path,
                      const std::string& header_comment);

}  // namespace fkfpe
