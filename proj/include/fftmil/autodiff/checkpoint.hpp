#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fftmil/autodiff/var.hpp"

namespace fftmil::ad {

/// One named tensor in a checkpoint: parameters and also non-trainable
/// state such as batch-norm running statistics.
struct TensorRecord {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::string design;  // fft design tag, or "-" for models without a frequency branch
  std::vector<TensorRecord> records;
};

// Layout (little endian):
//   "FMCK" u32 version u64 config_hash u16 len design
//   u32 record_count, then per record:
//   u16 len name u8 rank u32 dims[rank] f32 payload
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
/// Rejects a header whose config hash differs from `expected_hash`.
Checkpoint load_checkpoint(const std::filesystem::path& path, std::uint64_t expected_hash);

std::vector<TensorRecord> records_from(const ParameterSet<float>& params);
/// Copies matching records into `params`. Every parameter must be present
/// with an identical shape.
void apply_records(ParameterSet<float>& params, const std::vector<TensorRecord>& records);
const TensorRecord& find_record(const std::vector<TensorRecord>& records, const std::string& name);

}  // namespace fftmil::ad
