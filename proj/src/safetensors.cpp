#include "rhp/safetensors.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rhp/common.hpp"

namespace rhp {

static_assert(std::endian::native == std::endian::little, "safetensors I/O assumes a little-endian host");

namespace {

double half_to_double(std::uint16_t h) {
  const std::uint32_t sign = (h >> 15) & 1u;
  const std::uint32_t exp = (h >> 10) & 0x1Fu;
  const std::uint32_t mant = h & 0x3FFu;
  double value;
  if (exp == 0) {
    value = std::ldexp(static_cast<double>(mant), -24);
  } else if (exp == 31) {
    value = mant == 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  } else {
    value = std::ldexp(static_cast<double>(mant | 0x400u), static_cast<int>(exp) - 25);
  }
  return sign ? -value : value;
}

double bf16_to_double(std::uint16_t b) {
  const std::uint32_t bits = static_cast<std::uint32_t>(b) << 16;
  return static_cast<double>(std::bit_cast<float>(bits));
}

}  // namespace

std::map<std::string, Tensor> read_safetensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in || header_len > (1ull << 30)) throw DataError("'" + path.string() + "' is not a safetensors file");
  std::string header(header_len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated safetensors header in '" + path.string() + "'");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("bad safetensors header: ") + e.what());
  }
  const std::uint64_t data_start = 8 + header_len;
  const auto file_size = std::filesystem::file_size(path);

  std::map<std::string, Tensor> out;
  for (const auto& [name, info] : j.items()) {
    if (name == "__metadata__") continue;
    const std::string dtype = info.at("dtype").get<std::string>();
    std::size_t width = 0;
    if (dtype == "F64") width = 8;
    else if (dtype == "F32") width = 4;
    else if (dtype == "F16" || dtype == "BF16") width = 2;
    else continue;

    Tensor t;
    t.shape = info.at("shape").get<std::vector<std::size_t>>();
    const auto offsets = info.at("data_offsets").get<std::vector<std::uint64_t>>();
    const std::size_t count = shape_size(t.shape);
    if (offsets.size() != 2 || offsets[1] < offsets[0] || offsets[1] - offsets[0] != count * width ||
        data_start + offsets[1] > file_size) {
      throw DataError("inconsistent safetensors entry '" + name + "'");
    }
    std::string raw(count * width, '\0');
    in.seekg(static_cast<std::streamoff>(data_start + offsets[0]));
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("error reading tensor '" + name + "'");

    t.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const char* p = raw.data() + i * width;
      if (width == 8) {
        std::memcpy(&t.values[i], p, 8);
      } else if (width == 4) {
        float f;
        std::memcpy(&f, p, 4);
        t.values[i] = f;
      } else {
        std::uint16_t h;
        std::memcpy(&h, p, 2);
        t.values[i] = dtype == "F16" ? half_to_double(h) : bf16_to_double(h);
      }
    }
    out.emplace(name, std::move(t));
  }
  return out;
}

void write_safetensors(const std::filesystem::path& path, const std::map<std::string, Tensor>& tensors,
                       SafetensorsDtype dtype) {
  const std::size_t width = dtype == SafetensorsDtype::f64 ? 8 : 4;
  nlohmann::json header = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    const std::uint64_t bytes = t.values.size() * width;
    header[name] = {{"dtype", width == 8 ? "F64" : "F32"},
                    {"shape", t.shape},
                    {"data_offsets", {offset, offset + bytes}}};
    offset += bytes;
  }
  std::string h = header.dump();
  while ((h.size() + 8) % 8 != 0) h.push_back(' ');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::uint64_t len = h.size();
  out.write(reinterpret_cast<const char*>(&len), 8);
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& [name, t] : tensors) {
    for (double v : t.values) {
      if (width == 8) {
        out.write(reinterpret_cast<const char*>(&v), 8);
      } else {
        const float f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), 4);
      }
    }
  }
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

}  // namespace rhp
