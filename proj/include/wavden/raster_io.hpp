#pragma once

#include <string>

#include "wavden/plane.hpp"

namespace wavden {

enum class RasterFormat { WCR, PGM16 };

// WCR is the native float raster: magic "WCR1", little-endian u32 width,
// height, bands, reserved(0), then width*height*bands little-endian f32
// samples, band-sequential, row-major. Bit-exact round trip guaranteed.
//
// PGM16 (P5, maxval 65535, big-endian u16) is supported for single-band
// visual inspection; round trips exactly for integer-valued samples.
MultiBandRaster read_raster(const std::string& path);
void write_raster(const MultiBandRaster& raster, const std::string& path, RasterFormat format);

// Writes to "<path>.tmp<pid>" then renames, so readers never observe a
// partial file.
void write_raster_atomic(const MultiBandRaster& raster, const std::string& path,
                         RasterFormat format);

Plane read_plane(const std::string& path);                       // requires a 1-band file
void write_plane(const Plane& plane, const std::string& path);   // WCR, 1 band

}  // namespace wavden
