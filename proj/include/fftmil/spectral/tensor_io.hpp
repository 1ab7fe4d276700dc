#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fftmil/spectral/image.hpp"

namespace fftmil::spectral {

// On-disk tensor layout, all integers little-endian:
//
//   offset  size  field
//        0     4  magic "FMTS"
//        4     2  version (1)
//        6     2  dtype code (1 = float32)
//        8     4  channels
//       12     4  height
//       16     4  width
//       20     4  flags (bit 0: centered spectrum, bit 1: spatial-domain crop)
//       24     4  source height (0 for plain images)
//       28     4  source width
//       32     -  channels*height*width float32, row-major per channel

inline constexpr std::size_t kTensorHeaderBytes = 32;
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;

struct TensorHeader {
  std::uint16_t version = kTensorVersion;
  std::uint16_t dtype = kDtypeFloat32;
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  bool centered = false;
  bool spatial_domain = false;
  Dims source;
};

struct TensorBlob {
  TensorHeader header;
  std::vector<float> values;
};

std::vector<std::uint8_t> encode_tensor(const TensorHeader& header, std::span<const double> values);
/// Throws FormatError with the byte offset of the first problem.
TensorBlob decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor_file(const std::filesystem::path& path, const TensorHeader& header,
                       std::span<const double> values);
TensorBlob read_tensor_file(const std::filesystem::path& path);

void save_image(const std::filesystem::path& path, const SpatialImage& img);
SpatialImage load_image(const std::filesystem::path& path);

void save_crop(const std::filesystem::path& path, const FrequencyCrop& crop);
FrequencyCrop load_crop(const std::filesystem::path& path);

/// Rounds every value to the nearest float32 so that a save/load round trip
/// is bitwise exact.
void round_to_float32(SpatialImage& img);

}  // namespace fftmil::spectral
