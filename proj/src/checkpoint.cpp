/**
 * Copyright 2026 The SVF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "svf/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "binary_io.hpp"

namespace svf {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path);
  }
}

}  // namespace detail

namespace {
constexpr char kMagic[4] = {'S', 'V', 'F', 'C'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string encode_checkpoint(const ParamSet& params) {
  detail::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& e : params.entries()) {
    if (e.name.size() > std::numeric_limits<std::uint16_t>::max()) throw std::invalid_argument("parameter name too long");
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.u8(static_cast<std::uint8_t>(e.value.rank()));
    for (auto d : e.value.dims()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : e.value.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

std::vector<CheckpointEntry> decode_checkpoint(const std::string& bytes) {
  detail::ByteReader r(bytes);
  if (r.bytes(4, "magic") != std::string_view(kMagic, 4)) throw FormatError("bad checkpoint magic", 0);
  const auto version_at = r.offset();
  if (r.u32("version") != kVersion) throw FormatError("unsupported checkpoint version", version_at);
  const auto count = r.u32("entry count");
  std::vector<CheckpointEntry> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto len = r.u16("name length");
    e.name = std::string(r.bytes(len, "name"));
    const auto rank = r.u8("rank");
    std::uint64_t n = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      e.dims.push_back(r.u32("dims"));
      n *= e.dims.back();
    }
    r.need(n * 4, "values");
    e.values.resize(n);
    for (auto& v : e.values) v = r.f32("values");
    out.push_back(std::move(e));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint entries", r.offset());
  return out;
}

void save_checkpoint(const std::string& path, const ParamSet& params) {
  detail::write_file_atomic(path, encode_checkpoint(params));
}

std::vector<CheckpointEntry> read_checkpoint(const std::string& path) {
  return decode_checkpoint(detail::read_file(path));
}

void assign_checkpoint(ParamSet& params, const std::vector<CheckpointEntry>& entries) {
  if (entries.size() != params.size()) {
    throw StructuralError("checkpoint has " + std::to_string(entries.size()) + " entries, model expects " +
                          std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    auto& live = params.entries()[i];
    if (e.name != live.name) throw StructuralError("checkpoint entry " + e.name + " where model expects " + live.name);
    Dims dims(e.dims.begin(), e.dims.end());
    if (dims != live.value.dims()) {
      throw StructuralError("shape mismatch for " + e.name + ": checkpoint " + dims_to_string(dims) + ", model " +
                            dims_to_string(live.value.dims()));
    }
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto dst = params.entries()[i].value.mutable_data();
    const auto& src = entries[i].values;
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<double>(src[k]);
  }
}

ModelState load_model(const ModelConfig& config, const std::string& path) {
  auto entries = read_checkpoint(path);
  ModelState state = init_model(config, 0);
  assign_checkpoint(state.params, entries);
  return state;
}

}  // namespace svf
