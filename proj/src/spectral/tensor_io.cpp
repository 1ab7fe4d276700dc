#include "fftmil/spectral/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fftmil/error.hpp"

namespace fftmil::spectral {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'T', 'S'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
  throw FormatError("tensor file: " + what + " at byte offset " + std::to_string(offset));
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const TensorHeader& h, std::span<const double> values) {
  const std::size_t n = static_cast<std::size_t>(h.channels) * h.height * h.width;
  if (values.size() != n) throw InvalidArgument("encode_tensor: payload does not match header");
  std::vector<std::uint8_t> out;
  out.reserve(kTensorHeaderBytes + 4 * n);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u16(out, h.version);
  put_u16(out, h.dtype);
  put_u32(out, h.channels);
  put_u32(out, h.height);
  put_u32(out, h.width);
  put_u32(out, (h.centered ? 1u : 0u) | (h.spatial_domain ? 2u : 0u));
  put_u32(out, static_cast<std::uint32_t>(h.source.height));
  put_u32(out, static_cast<std::uint32_t>(h.source.width));
  for (double v : values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

TensorBlob decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTensorHeaderBytes) fail(bytes.size(), "truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) fail(0, "bad magic");
  TensorBlob blob;
  auto& h = blob.header;
  h.version = get_u16(bytes, 4);
  if (h.version != kTensorVersion) fail(4, "unsupported version " + std::to_string(h.version));
  h.dtype = get_u16(bytes, 6);
  if (h.dtype != kDtypeFloat32) fail(6, "unsupported dtype code " + std::to_string(h.dtype));
  h.channels = get_u32(bytes, 8);
  h.height = get_u32(bytes, 12);
  h.width = get_u32(bytes, 16);
  if (h.channels == 0) fail(8, "zero channels");
  if (h.height == 0) fail(12, "zero height");
  if (h.width == 0) fail(16, "zero width");
  const std::uint32_t flags = get_u32(bytes, 20);
  if (flags & ~3u) fail(20, "unknown flag bits");
  h.centered = flags & 1u;
  h.spatial_domain = flags & 2u;
  h.source = {static_cast<int>(get_u32(bytes, 24)), static_cast<int>(get_u32(bytes, 28))};

  const std::size_t n = static_cast<std::size_t>(h.channels) * h.height * h.width;
  const std::size_t expected = kTensorHeaderBytes + 4 * n;
  if (bytes.size() < expected) fail(bytes.size(), "truncated payload (expected " +
                                                      std::to_string(expected) + " bytes)");
  if (bytes.size() > expected) fail(expected, "trailing bytes after payload");
  blob.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    blob.values[i] = std::bit_cast<float>(get_u32(bytes, kTensorHeaderBytes + 4 * i));
  return blob;
}

void write_tensor_file(const std::filesystem::path& path, const TensorHeader& header,
                       std::span<const double> values) {
  const auto bytes = encode_tensor(header, values);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TensorBlob read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

SpatialImage to_image(const TensorBlob& blob) {
  std::vector<double> data(blob.values.begin(), blob.values.end());
  return SpatialImage(static_cast<int>(blob.header.channels), static_cast<int>(blob.header.height),
                      static_cast<int>(blob.header.width), std::move(data));
}

}  // namespace

void save_image(const std::filesystem::path& path, const SpatialImage& img) {
  TensorHeader h;
  h.channels = img.channels();
  h.height = img.height();
  h.width = img.width();
  write_tensor_file(path, h, img.data());
}

SpatialImage load_image(const std::filesystem::path& path) { return to_image(read_tensor_file(path)); }

void save_crop(const std::filesystem::path& path, const FrequencyCrop& crop) {
  TensorHeader h;
  h.channels = crop.data.channels();
  h.height = crop.data.height();
  h.width = crop.data.width();
  h.centered = crop.domain == CropDomain::frequency;
  h.spatial_domain = crop.domain == CropDomain::spatial;
  h.source = crop.source_dims;
  write_tensor_file(path, h, crop.data.data());
}

FrequencyCrop load_crop(const std::filesystem::path& path) {
  const TensorBlob blob = read_tensor_file(path);
  FrequencyCrop crop;
  crop.data = to_image(blob);
  crop.crop_size = static_cast<int>(blob.header.height);
  crop.source_dims = blob.header.source;
  crop.domain = blob.header.spatial_domain ? CropDomain::spatial : CropDomain::frequency;
  return crop;
}

void round_to_float32(SpatialImage& img) {
  for (double& v : img.data()) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace fftmil::spectral
