#pragma once

#include <string>
#include <vector>

#include "sfpe/spectral_field.hpp"

namespace sfpe {

// Binary field record, byte-exact layout (all integers and floats little
// endian; see docs/formats.md):
//   bytes 0..4   magic "SFPE1"
//   byte  5      dim (u8)
//   bytes 6..9   modes per axis N (u32)
//   bytes 10..17 torus side L (f64)
//   bytes 18..21 component count (u32)
//   bytes 22..29 time tag (f64)
//   then components * N^dim coefficient pairs (re f64, im f64), components
//   outermost, flat mode index row-major in FFT order.
void write_field(const std::string& path, const SpectralField& f, double time_tag = 0.0);
SpectralField read_field(const std::string& path, double* time_tag = nullptr);

// A TimeField is a concatenation of field records, one per snapshot, the
// time tag carrying the grid node.
void write_time_field(const std::string& path, const TimeField& tf);
TimeField read_time_field(const std::string& path);

}  // namespace sfpe
