#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rhp/tensor.hpp"

namespace rhp {

// Reads a .safetensors file (8-byte little-endian header length, JSON
// header, raw little-endian data). F64, F32, F16 and BF16 tensors are
// widened to double; other dtypes are skipped.
std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path);

enum class SafetensorsDtype { f32, f64 };

void write_safetensors(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors,
                       SafetensorsDtype dtype = SafetensorsDtype::f32);

}  // namespace rhp
