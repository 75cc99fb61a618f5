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

#include "bpds/rng.hpp"
#include "bpds/types.hpp"

namespace bpds {

/// 256-bit symmetric key for the authenticated cipher (AES-256-GCM).
struct SymKey {
  std::array<uint8_t, 32> bytes{};

  static SymKey random(Rng& rng);
  auto operator<=>(const SymKey&) const = default;
};

/// Seals plaintext as nonce(12) || ciphertext || tag(16). The nonce comes
/// from the caller's rng; one rng stream per key keeps nonces unique.
Bytes aead_seal(const SymKey& key, ByteView plaintext, Rng& rng);

/// Opens a sealed blob; throws Errc::decrypt on wrong key or any tampering.
Bytes aead_open(const SymKey& key, ByteView blob);

}  // namespace bpds
