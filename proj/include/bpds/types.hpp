// Copyright 2026 The BPDS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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
#include <span>
#include <string>
#include <vector>

#include "bpds/errors.hpp"

namespace bpds {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

/// Simulated time in integer milliseconds.
using Time = int64_t;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(const std::string& s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}
inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

/// 16-byte opaque identifier. The tag keeps account and object ids
/// from being mixed up at compile time.
template <typename Tag>
struct Id16 {
  std::array<uint8_t, 16> bytes{};

  auto operator<=>(const Id16&) const = default;
  std::string hex() const { return to_hex(ByteView(bytes.data(), bytes.size())); }

  static Id16 from_hex_str(std::string_view h) {
    Id16 id;
    Bytes raw = from_hex(h);
    if (raw.size() != id.bytes.size()) fail(Errc::decode, "identifier must be 16 bytes");
    std::copy(raw.begin(), raw.end(), id.bytes.begin());
    return id;
  }
};

struct AccountTag;
struct ObjectTag;

/// Account handle derived from a public key; never a real-world identity.
using AccountId = Id16<AccountTag>;
/// On-chain object handle (a patient record contract).
using ObjectId = Id16<ObjectTag>;

/// Consortium node / simulated network endpoint identifier.
struct NodeId {
  uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

}  // namespace bpds
