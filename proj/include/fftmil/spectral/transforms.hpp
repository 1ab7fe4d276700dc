#pragma once

#include "fftmil/spectral/image.hpp"

namespace fftmil::spectral {

enum class ShiftDirection { forward, inverse };

/// Per-channel unnormalized 2D DFT: F(u,v) = sum_xy I(x,y) e^{-2 pi i (ux/H + vy/W)}.
/// Rejects non-finite input, naming the channel.
Spectrum fft2d(const SpatialImage& img);

/// Inverse DFT with the 1/(HW) factor. Requires an un-centered spectrum.
/// When the spectrum is flagged `from_real`, a residual imaginary part above
/// 1e-6 * max|real| is reported as a ContractViolation; otherwise the
/// imaginary part is dropped.
SpatialImage ifft2d(const Spectrum& spec);

/// Moves the zero-frequency bin to (H/2, W/2) (forward) or back (inverse).
/// Works for odd sizes; forward followed by inverse is the identity.
Spectrum fftshift(const Spectrum& spec, ShiftDirection direction);

/// Keeps bins H/2 - crop/2 <= u < H/2 + crop/2 (same for v) of a centered
/// spectrum and zero-pads around the center when the spectrum is smaller
/// than `crop`. Output is crop x crop. `crop` must be positive and even.
Spectrum center_crop_pad(const Spectrum& spec, int crop);

/// Same index mapping as center_crop_pad, but to an arbitrary out_h x out_w
/// window and without the centered precondition. Used for the high-frequency
/// region ablation (cropping the un-shifted spectrum) and for padding a crop
/// back to full size.
Spectrum recenter_window(const Spectrum& spec, int out_h, int out_w);

/// Magnitude and full-quadrant phase. A zero bin has phase 0.
MagPhasePack mag_phase(const Spectrum& spec);

/// Magnitude channels first, then phase channels.
FrequencyCrop pack_crop(const MagPhasePack& mp, Dims source_dims);
MagPhasePack unpack_crop(const FrequencyCrop& crop);

/// Low-pass reconstruction from a centered crop: zero-pad back to the
/// (even-rounded) original size, un-center, inverse FFT, trim, clamp to [0,1].
SpatialImage reconstruct_lowpass(const Spectrum& crop, Dims original_dims);

/// Area averaging over factor x factor blocks; non-divisible sizes are
/// zero-padded up to the next multiple first.
SpatialImage downsample(const SpatialImage& img, int factor);

/// Zero-pads one row and/or column on the high-index side so both dims are even.
SpatialImage pad_to_even(const SpatialImage& img);

}  // namespace fftmil::spectral
