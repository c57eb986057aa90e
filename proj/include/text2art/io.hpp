// Copyright 2026 The text2art Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File helpers and a little-endian byte reader/writer shared by the binary
// formats (feature files, checkpoints).

#ifndef TEXT2ART_IO_HPP
#define TEXT2ART_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "text2art/error.hpp"

namespace text2art::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

/// Appends fixed-width little-endian values to a byte buffer.
class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    bytes_.append(raw, sizeof(T));
  }

  void put_bytes(std::string_view s) { bytes_.append(s); }

  /// u16 length prefix followed by the bytes.
  void put_short_string(std::string_view s) {
    if (s.size() > 0xFFFF) throw ArgumentError("string longer than 65535 bytes");
    put(static_cast<std::uint16_t>(s.size()));
    put_bytes(s);
  }

  const std::string& bytes() const noexcept { return bytes_; }
  std::string release() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

/// Bounds-checked cursor over a byte buffer. Running off the end raises
/// CorruptionError carrying the offset of the failed read.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string_view get_bytes(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string get_short_string(const char* what) {
    auto n = get<std::uint16_t>(what);
    return std::string(get_bytes(n, what));
  }

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw CorruptionError(std::string("truncated ") + what, pos_);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace text2art::io

#endif  // TEXT2ART_IO_HPP
