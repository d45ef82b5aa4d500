#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "odibench/backend/message.hpp"

namespace odibench::backend {

// Minimal SHA-256 (FIPS 180-4). Checked against the published test vectors.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  std::array<std::uint8_t, 32> finish();

  static std::array<std::uint8_t, 32> digest(const void* data, std::size_t len);

 private:
  void process_block(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_;
  std::uint64_t total_len_ = 0;
  std::size_t buffer_len_ = 0;
};

std::string to_hex(const std::array<std::uint8_t, 32>& bytes);

// Content address of a request: hash of model id, decoding parameters and
// the canonicalized message list including raw image bytes. Any byte of
// difference in any part produces a different digest.
struct CacheKey {
  std::string hex;
  bool operator==(const CacheKey&) const = default;
};

CacheKey request_digest(const ModelRequest& req);

}  // namespace odibench::backend
