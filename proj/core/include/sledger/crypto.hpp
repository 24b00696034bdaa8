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

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "sledger/encoding.hpp"

namespace sledger {

// SHA-256 digest.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  static Digest zero() { return {}; }
  static Digest from_hex(std::string_view hex);
  std::string hex() const;
  std::string short_hex() const { return hex().substr(0, 12); }

  auto operator<=>(const Digest&) const = default;
};

Digest hash_content(ByteView bytes);
inline Digest hash_content(const Bytes& bytes) {
  return hash_content(ByteView(bytes));
}

// Incremental SHA-256 for digests over large ordered collections.
class Hasher {
 public:
  Hasher();
  Hasher& update(ByteView bytes);
  Digest finish();

 private:
  alignas(64) std::array<std::uint8_t, 128> state_{};
};

struct PublicKey {
  std::array<std::uint8_t, 32> bytes{};
  std::string hex() const;
  static PublicKey from_hex(std::string_view hex);
  auto operator<=>(const PublicKey&) const = default;
};

struct Signature {
  std::array<std::uint8_t, 64> bytes{};
  auto operator<=>(const Signature&) const = default;
};

// Ed25519 key pair. Signing is deterministic, which the simulator relies on
// for byte-identical ledgers across runs.
class KeyPair {
 public:
  static KeyPair from_seed(const std::array<std::uint8_t, 32>& seed);
  // Derives a key from (principal, scenario seed); used to provision
  // reproducible identities.
  static KeyPair derive(std::string_view principal, std::uint64_t seed);

  const PublicKey& public_key() const { return public_; }
  Signature sign(ByteView message) const;

 private:
  PublicKey public_;
  std::array<std::uint8_t, 64> secret_{};
};

bool verify_signature(const PublicKey& key, ByteView message,
                      const Signature& signature);

// Principal id -> key pair. Throws Errc::unknown_principal on lookups of
// unregistered principals.
class KeyRing {
 public:
  void add(std::string principal, KeyPair keys);
  bool contains(std::string_view principal) const;
  const KeyPair& keys(std::string_view principal) const;
  const PublicKey& public_key(std::string_view principal) const;

  Signature sign(std::string_view principal, ByteView message) const;
  bool verify(std::string_view principal, ByteView message,
              const Signature& signature) const;

 private:
  std::map<std::string, KeyPair, std::less<>> keys_;
};

}  // namespace sledger
