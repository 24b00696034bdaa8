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
#include <gtest/gtest.h>

#include "sledger/crypto.hpp"
#include "sledger/encoding.hpp"
#include "sledger/error.hpp"

namespace {

using namespace sledger;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sledger::Error thrown";
  return Errc::invalid_argument;
}

TEST(ByteWriter, FixedWidthBigEndian) {
  ByteWriter w;
  w.u8(0xab).u32(0x01020304).u64(5).i64(-1).boolean(true).f64(1.0);
  EXPECT_EQ(to_hex(w.view()),
            "ab"
            "01020304"
            "0000000000000005"
            "ffffffffffffffff"
            "01"
            "3ff0000000000000");
}

TEST(ByteWriter, LengthPrefixedStrings) {
  ByteWriter w;
  w.str("ab").bytes(Bytes{0xff}).str("");
  EXPECT_EQ(to_hex(w.view()), "00000002616200000001ff00000000");
}

TEST(ByteReader, RoundTrip) {
  ByteWriter w;
  w.u8(7).u32(42).u64(1ULL << 40).i64(-9).boolean(false).f64(-2.5).str("héllo").bytes(Bytes{1, 2});
  auto buf = w.take();
  ByteReader r(buf);
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u32(), 42u);
  EXPECT_EQ(r.u64(), 1ULL << 40);
  EXPECT_EQ(r.i64(), -9);
  EXPECT_FALSE(r.boolean());
  EXPECT_EQ(r.f64(), -2.5);
  EXPECT_EQ(r.str(), "héllo");
  EXPECT_EQ(r.bytes(), (Bytes{1, 2}));
  r.expect_end();
}

TEST(ByteReader, StrictDecoding) {
  const Bytes three{0, 0, 1};
  EXPECT_EQ(code_of([&] { ByteReader(three).u32(); }), Errc::decode_error);

  const Bytes two_bools{1, 2};
  ByteReader r(two_bools);
  EXPECT_TRUE(r.boolean());
  EXPECT_EQ(code_of([&] { r.boolean(); }), Errc::decode_error);

  const Bytes trailing{0, 0, 0, 0, 9};
  EXPECT_EQ(code_of([&] {
              ByteReader t(trailing);
              t.u32();
              t.expect_end();
            }),
            Errc::decode_error);

  // A string claiming more bytes than remain.
  const Bytes lying{0, 0, 0, 9, 'a'};
  EXPECT_EQ(code_of([&] { ByteReader(lying).str(); }), Errc::decode_error);

  const Bytes huge_count{0xff, 0xff, 0xff, 0xff};
  EXPECT_EQ(code_of([&] { ByteReader(huge_count).count(8); }), Errc::decode_error);
}

TEST(Hex, RoundTripAndErrors) {
  Bytes b{0x00, 0x7f, 0x80, 0xff};
  EXPECT_EQ(to_hex(b), "007f80ff");
  EXPECT_EQ(from_hex("007F80ff"), b);
  EXPECT_EQ(code_of([] { from_hex("abc"); }), Errc::decode_error);
  EXPECT_EQ(code_of([] { from_hex("zz"); }), Errc::decode_error);
}

// FIPS 180-2 example vectors.
TEST(Sha256, KnownVectors) {
  EXPECT_EQ(hash_content(to_bytes("abc")).hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(hash_content(Bytes{}).hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(
      hash_content(to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")).hex(),
      "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Sha256, IncrementalMatchesOneShot) {
  Bytes data;
  for (int i = 0; i < 100000; ++i) data.push_back(static_cast<std::uint8_t>(i * 31));
  Hasher h;
  for (std::size_t off = 0; off < data.size(); off += 4099) {
    auto n = std::min<std::size_t>(4099, data.size() - off);
    h.update(ByteView(data.data() + off, n));
  }
  EXPECT_EQ(h.finish(), hash_content(data));
}

TEST(Digest, HexRoundTrip) {
  auto d = hash_content(to_bytes("x"));
  EXPECT_EQ(Digest::from_hex(d.hex()), d);
  EXPECT_EQ(d.short_hex(), d.hex().substr(0, 12));
}

// RFC 8032 section 7.1, test 1.
TEST(Ed25519, Rfc8032Vector) {
  std::array<std::uint8_t, 32> seed{};
  auto s = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  std::copy(s.begin(), s.end(), seed.begin());
  auto kp = KeyPair::from_seed(seed);
  EXPECT_EQ(kp.public_key().hex(),
            "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  auto sig = kp.sign(ByteView{});
  EXPECT_EQ(to_hex(sig.bytes),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e"
            "39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  EXPECT_TRUE(verify_signature(kp.public_key(), ByteView{}, sig));
}

TEST(Ed25519, TamperedInputsFail) {
  auto kp = KeyPair::derive("n0", 1);
  auto msg = to_bytes("vote");
  auto sig = kp.sign(msg);
  EXPECT_TRUE(verify_signature(kp.public_key(), msg, sig));
  auto bad_sig = sig;
  bad_sig.bytes[10] ^= 1;
  EXPECT_FALSE(verify_signature(kp.public_key(), msg, bad_sig));
  auto bad_msg = msg;
  bad_msg[0] ^= 1;
  EXPECT_FALSE(verify_signature(kp.public_key(), bad_msg, sig));
  EXPECT_FALSE(verify_signature(KeyPair::derive("n1", 1).public_key(), msg, sig));
}

TEST(KeyPair, DeriveIsDeterministic) {
  EXPECT_EQ(KeyPair::derive("c0", 7).public_key(), KeyPair::derive("c0", 7).public_key());
  EXPECT_NE(KeyPair::derive("c0", 7).public_key(), KeyPair::derive("c0", 8).public_key());
  EXPECT_NE(KeyPair::derive("c0", 7).public_key(), KeyPair::derive("c1", 7).public_key());
}

TEST(KeyRing, UnknownPrincipal) {
  KeyRing ring;
  ring.add("a", KeyPair::derive("a", 1));
  EXPECT_TRUE(ring.contains("a"));
  EXPECT_EQ(code_of([&] { ring.keys("b"); }), Errc::unknown_principal);
  auto sig = ring.sign("a", to_bytes("m"));
  EXPECT_TRUE(ring.verify("a", to_bytes("m"), sig));
}

}  // namespace
