#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcdiff/grid.hpp"

namespace tcdiff {

// 8-bit grayscale PNG. pixels is row-major, size width*height.
void write_png_gray(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels);

// Tile fields into a roughly square montage (each rescaled to [0,1] on its
// own) separated by 1px white gutters and write it as one PNG.
void write_field_montage(const std::string& path,
                         const std::vector<GridField>& fields);

}  // namespace tcdiff
