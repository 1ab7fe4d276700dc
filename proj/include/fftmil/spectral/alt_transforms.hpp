#pragma once

#include <string_view>

#include "fftmil/spectral/image.hpp"

namespace fftmil::spectral {

/// Compressed representations compared against the centered FFT crop.
enum class AltMode { rfft, dct, dct_abs, dwt_ll };

AltMode parse_alt_mode(std::string_view name);
const char* to_string(AltMode mode);

/// Hermitian half-spectrum: columns 0..W/2 of the unnormalized DFT.
Spectrum rfft2d(const SpatialImage& img);

/// Orthonormal 2D DCT-II. Only the top-left keep_rows x keep_cols
/// coefficients are computed (pass 0 for the full size).
SpatialImage dct2d(const SpatialImage& img, int keep_rows = 0, int keep_cols = 0);

/// Single-level orthonormal Haar LL sub-band: (a + b + c + d) / 2 per 2x2
/// block. Odd sizes are zero-padded first.
SpatialImage haar_ll(const SpatialImage& img);

/// Bilinear resize with half-pixel centers (edges clamped).
SpatialImage resize_bilinear(const SpatialImage& img, int out_h, int out_w);

/// rfft    -> top-left crop of the half-spectrum, packed as magnitude|phase (2C channels)
/// dct     -> top-left crop of the DCT-II coefficients (C channels)
/// dct_abs -> absolute values of the above
/// dwt_ll  -> Haar LL resized to crop x crop (C channels, spatial domain)
FrequencyCrop alt_transform(const SpatialImage& img, AltMode mode, int crop);

}  // namespace fftmil::spectral
