// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 trajcast contributors

#include "trajcast/binio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace trajcast {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failed: " + path);
  return bytes;
}

void write_file_bytes(const std::string& path, std::string_view bytes) {
  // Write to a sibling temp file and rename, so a crash never leaves a
  // half-written file under the final name.
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path + ": " + ec.message());
  }
}

std::string wrap_envelope(std::string_view magic, std::uint32_t version, std::string_view payload) {
  ByteWriter w;
  w.bytes(magic.data(), magic.size());
  w.u32(version);
  w.u64(payload.size());
  w.u64(fnv1a64_bytes(payload.data(), payload.size()));
  w.bytes(payload.data(), payload.size());
  return w.take();
}

std::string unwrap_envelope(std::string_view magic, std::uint32_t version, std::string_view bytes,
                            std::string_view what) {
  std::string name(what);
  ByteReader r(bytes);
  std::string got_magic;
  try {
    for (std::size_t i = 0; i < magic.size(); ++i) got_magic.push_back(static_cast<char>(r.u8()));
    if (got_magic != magic) throw std::runtime_error(name + ": bad magic");
    std::uint32_t got_version = r.u32();
    if (got_version != version)
      throw std::runtime_error(name + ": unsupported version " + std::to_string(got_version));
    std::uint64_t payload_size = r.u64();
    std::uint64_t checksum = r.u64();
    if (r.remaining() != payload_size) throw std::runtime_error(name + ": payload size mismatch");
    std::string payload(bytes.substr(bytes.size() - r.remaining()));
    if (fnv1a64_bytes(payload.data(), payload.size()) != checksum)
      throw std::runtime_error(name + ": checksum mismatch");
    return payload;
  } catch (const std::runtime_error& e) {
    // Normalize truncation errors so callers see which format failed.
    std::string msg = e.what();
    if (msg.find(name) == std::string::npos) throw std::runtime_error(name + ": " + msg);
    throw;
  }
}

}  // namespace trajcast
