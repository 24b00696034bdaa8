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

// Canonical byte encoding shared by every hashed or signed entity.
//
// Integers are fixed-width big-endian, variable-length fields carry a u32
// length prefix, digests and signatures are written raw. Decoding is strict:
// truncation, oversized lengths and trailing bytes are all errors, so a
// buffer decodes to at most one value.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

Bytes to_bytes(std::string_view s);
std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v);
  ByteWriter& f64(double v);
  ByteWriter& boolean(bool v);
  ByteWriter& bytes(ByteView v);
  ByteWriter& str(std::string_view v);
  ByteWriter& raw(ByteView v);

  template <std::size_t N>
  ByteWriter& fixed(const std::array<std::uint8_t, N>& v) {
    return raw(ByteView(v.data(), v.size()));
  }

  const Bytes& view() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  bool boolean();
  Bytes bytes();
  std::string str();
  ByteView raw(std::size_t n);

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    std::array<std::uint8_t, N> out{};
    auto v = raw(N);
    std::copy(v.begin(), v.end(), out.begin());
    return out;
  }

  // Guards element counts read from the wire against absurd allocations.
  std::uint32_t count(std::size_t min_element_size);

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  void expect_end() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace sledger
