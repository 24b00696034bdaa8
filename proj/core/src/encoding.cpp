// Copyright 2026 The Sledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sledger/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "sledger/error.hpp"

namespace sledger {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::version_conflict: return "version-conflict";
    case Errc::immutability_violation: return "immutability-violation";
    case Errc::not_found: return "not-found";
    case Errc::unknown_function: return "unknown-function";
    case Errc::crash_fault: return "crash-fault";
    case Errc::unknown_principal: return "unknown-principal";
    case Errc::decode_error: return "decode-error";
    case Errc::invalid_config: return "invalid-config";
    case Errc::schema_error: return "schema-error";
    case Errc::out_of_range: return "out-of-range";
    case Errc::degenerate_anchors: return "degenerate-anchors";
    case Errc::chain_verification_failure: return "chain-verification-failure";
    case Errc::invalid_certificate: return "invalid-certificate";
    case Errc::parse_error: return "parse-error";
    case Errc::bad_signature: return "bad-signature";
    case Errc::stale_head: return "stale-head";
    case Errc::message_lost: return "message-lost";
  }
  return "unknown";
}

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(Errc::decode_error, "hex string has odd length");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(Errc::decode_error, "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::i64(std::int64_t v) {
  return u64(static_cast<std::uint64_t>(v));
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::boolean(bool v) { return u8(v ? 1 : 0); }

ByteWriter& ByteWriter::bytes(ByteView v) {
  if (v.size() > UINT32_MAX) {
    throw Error(Errc::invalid_argument, "field exceeds 4 GiB");
  }
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

ByteWriter& ByteWriter::str(std::string_view v) {
  return bytes(ByteView(reinterpret_cast<const std::uint8_t*>(v.data()), v.size()));
}

ByteWriter& ByteWriter::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteView ByteReader::raw(std::size_t n) {
  if (n > remaining()) {
    throw Error(Errc::decode_error, "truncated input");
  }
  ByteView v = in_.subspan(pos_, n);
  pos_ += n;
  return v;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto v = raw(4);
  std::uint32_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

std::uint64_t ByteReader::u64() {
  auto v = raw(8);
  std::uint64_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

std::int64_t ByteReader::i64() { return static_cast<std::int64_t>(u64()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

bool ByteReader::boolean() {
  auto v = u8();
  if (v > 1) {
    throw Error(Errc::decode_error, "non-canonical boolean");
  }
  return v == 1;
}

Bytes ByteReader::bytes() {
  auto n = u32();
  auto v = raw(n);
  return Bytes(v.begin(), v.end());
}

std::string ByteReader::str() {
  auto n = u32();
  auto v = raw(n);
  return std::string(v.begin(), v.end());
}

std::uint32_t ByteReader::count(std::size_t min_element_size) {
  auto n = u32();
  if (min_element_size > 0 && n > remaining() / min_element_size) {
    throw Error(Errc::decode_error, "element count exceeds input size");
  }
  return n;
}

void ByteReader::expect_end() const {
  if (remaining() != 0) {
    throw Error(Errc::decode_error, "trailing bytes after entity");
  }
}

}  // namespace sledger
