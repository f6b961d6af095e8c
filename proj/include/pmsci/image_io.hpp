#pragma once

#include <string>

#include "pmsci/matrix.hpp"

namespace pmsci {

// Loads an 8-bit PNG (gray or RGB) or binary PGM (P5). Color inputs are
// converted to gray with BT.601 luma weights. Values land in [0, 255].
Image load_image(const std::string& path);

// Writes an 8-bit gray image; the format is picked from the extension
// (.png or .pgm). Values are rounded half away from zero and clamped.
void save_image(const Image& img, const std::string& path);

// BT.601 luma of one 8-bit RGB triple, computed as (299r+587g+114b)/1000
// so equal channels map to their exact common value.
double bt601_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace pmsci
