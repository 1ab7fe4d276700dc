#include "fftmil/autodiff/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "fftmil/error.hpp"

namespace fftmil::ad {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <class U>
void put(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

struct Reader {
  std::span<const std::uint8_t> b;
  std::size_t off = 0;

  void need(std::size_t n, const char* what) const {
    if (off + n > b.size())
      throw FormatError(std::string("checkpoint: truncated ") + what + " at byte offset " +
                        std::to_string(off));
  }
  template <class U>
  U get(const char* what) {
    need(sizeof(U), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
    off += sizeof(U);
    return static_cast<U>(v);
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b.data() + off), n);
    off += n;
    return s;
  }
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, ck.config_hash);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(ck.design.size()));
  out.insert(out.end(), ck.design.begin(), ck.design.end());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.records.size()));
  for (const auto& r : ck.records) {
    if (numel(r.shape) != r.values.size())
      throw InvalidArgument("checkpoint record '" + r.name + "' does not match its shape");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(r.shape.size()));
    for (int d : r.shape) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (float v : r.values) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader rd{bytes};
  rd.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic at byte offset 0");
  rd.off = 4;
  const auto version = rd.get<std::uint32_t>("version");
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version) + " at byte offset 4");
  Checkpoint ck;
  ck.config_hash = rd.get<std::uint64_t>("config hash");
  ck.design = rd.str(rd.get<std::uint16_t>("design tag"), "design tag");
  const auto count = rd.get<std::uint32_t>("record count");
  for (std::uint32_t k = 0; k < count; ++k) {
    TensorRecord r;
    r.name = rd.str(rd.get<std::uint16_t>("record name"), "record name");
    const auto rank = rd.get<std::uint8_t>("record rank");
    for (int d = 0; d < rank; ++d) r.shape.push_back(static_cast<int>(rd.get<std::uint32_t>("record shape")));
    const std::size_t n = numel(r.shape);
    rd.need(4 * n, "record payload");
    r.values.resize(n);
    for (auto& v : r.values) v = std::bit_cast<float>(rd.get<std::uint32_t>("record payload"));
    ck.records.push_back(std::move(r));
  }
  if (rd.off != bytes.size())
    throw FormatError("checkpoint: trailing bytes at byte offset " + std::to_string(rd.off));
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const auto bytes = encode_checkpoint(ck);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Checkpoint ck;
  try {
    ck = decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (ck.config_hash != expected_hash)
    throw FormatError(path.string() + ": checkpoint was written for a different configuration (hash " +
                      std::to_string(ck.config_hash) + ", expected " + std::to_string(expected_hash) + ")");
  return ck;
}

std::vector<TensorRecord> records_from(const ParameterSet<float>& params) {
  std::vector<TensorRecord> out;
  for (const auto& p : params.items())
    out.push_back({p.name, p.var.shape(), {p.var.value().begin(), p.var.value().end()}});
  return out;
}

const TensorRecord& find_record(const std::vector<TensorRecord>& records, const std::string& name) {
  for (const auto& r : records)
    if (r.name == name) return r;
  throw FormatError("checkpoint has no tensor named '" + name + "'");
}

void apply_records(ParameterSet<float>& params, const std::vector<TensorRecord>& records) {
  for (auto& p : params.items()) {
    const TensorRecord& r = find_record(records, p.name);
    if (r.shape != p.var.shape())
      throw FormatError("checkpoint tensor '" + p.name + "' has shape " + shape_string(r.shape) +
                        ", model expects " + shape_string(p.var.shape()));
    std::copy(r.values.begin(), r.values.end(), p.var.mutable_value().begin());
  }
}

}  // namespace fftmil::ad
