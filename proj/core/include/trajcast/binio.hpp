// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors
//
// Little-endian binary encoding helpers shared by the scene cache, checkpoint
// and prediction file formats. Encoding is explicit byte-by-byte so files are
// identical across hosts.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trajcast {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }

  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s.data(), s.size());
  }

  void bytes(const void* data, std::size_t n) { buf_.append(static_cast<const char*>(data), n); }

  const std::string& buffer() const { return buf_; }
  std::string take() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

 private:
  std::string buf_;
};

/// Bounds-checked reader. Any overrun throws, so corrupt files are rejected
/// before any partially decoded result escapes.
class ByteReader {
 public:
  ByteReader(const void* data, std::size_t size)
      : data_(static_cast<const unsigned char*>(data)), size_(size) {}

  explicit ByteReader(std::string_view s) : ByteReader(s.data(), s.size()) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

  float f32() { return std::bit_cast<float>(u32()); }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return size_ - pos_; }
  bool at_end() const { return pos_ == size_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw std::runtime_error("binio: truncated or corrupt record");
  }

  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

/// FNV-1a 64 over a raw buffer; payload checksum for the file formats.
inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::string_view bytes);

/// File envelope shared by all trajcast formats: 4-byte magic, u32 version,
/// u64 payload size, u64 FNV-1a checksum, payload.
std::string wrap_envelope(std::string_view magic, std::uint32_t version, std::string_view payload);

/// Validates magic, version and checksum; returns the payload. Throws
/// std::runtime_error naming `what` on any mismatch.
std::string unwrap_envelope(std::string_view magic, std::uint32_t version, std::string_view bytes,
                            std::string_view what);

}  // namespace trajcast
