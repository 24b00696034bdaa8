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

#include "sledger/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "sledger/error.hpp"

namespace sledger {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialisation failed");
    }
  });
}

static_assert(sizeof(crypto_hash_sha256_state) <= 128);

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
  auto raw = sledger::from_hex(hex);
  if (raw.size() != 32) {
    throw Error(Errc::decode_error, "digest must be 32 bytes");
  }
  Digest d;
  std::copy(raw.begin(), raw.end(), d.bytes.begin());
  return d;
}

std::string Digest::hex() const { return to_hex(ByteView(bytes)); }

Digest hash_content(ByteView bytes) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), bytes.data(), bytes.size());
  return d;
}

Hasher::Hasher() {
  ensure_sodium();
  crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()));
}

Hasher& Hasher::update(ByteView bytes) {
  crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()),
                            bytes.data(), bytes.size());
  return *this;
}

Digest Hasher::finish() {
  Digest d;
  crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()),
                           d.bytes.data());
  return d;
}

std::string PublicKey::hex() const { return to_hex(ByteView(bytes)); }

PublicKey PublicKey::from_hex(std::string_view hex) {
  auto raw = sledger::from_hex(hex);
  if (raw.size() != 32) {
    throw Error(Errc::decode_error, "public key must be 32 bytes");
  }
  PublicKey k;
  std::copy(raw.begin(), raw.end(), k.bytes.begin());
  return k;
}

KeyPair KeyPair::from_seed(const std::array<std::uint8_t, 32>& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_.bytes.data(), kp.secret_.data(), seed.data());
  return kp;
}

KeyPair KeyPair::derive(std::string_view principal, std::uint64_t seed) {
  ByteWriter w;
  w.str("sledger-identity").str(principal).u64(seed);
  return from_seed(hash_content(w.view()).bytes);
}

Signature KeyPair::sign(ByteView message) const {
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       secret_.data());
  return sig;
}

bool verify_signature(const PublicKey& key, ByteView message,
                      const Signature& signature) {
  ensure_sodium();
  return crypto_sign_verify_detached(signature.bytes.data(), message.data(),
                                     message.size(), key.bytes.data()) == 0;
}

void KeyRing::add(std::string principal, KeyPair keys) {
  keys_.insert_or_assign(std::move(principal), std::move(keys));
}

bool KeyRing::contains(std::string_view principal) const {
  return keys_.find(principal) != keys_.end();
}

const KeyPair& KeyRing::keys(std::string_view principal) const {
  auto it = keys_.find(principal);
  if (it == keys_.end()) {
    throw Error(Errc::unknown_principal,
                "unknown principal '" + std::string(principal) + "'");
  }
  return it->second;
}

const PublicKey& KeyRing::public_key(std::string_view principal) const {
  return keys(principal).public_key();
}

Signature KeyRing::sign(std::string_view principal, ByteView message) const {
  return keys(principal).sign(message);
}

bool KeyRing::verify(std::string_view principal, ByteView message,
                     const Signature& signature) const {
  return verify_signature(public_key(principal), message, signature);
}

}  // namespace sledger
