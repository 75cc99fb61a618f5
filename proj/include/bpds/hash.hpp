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

#include "bpds/types.hpp"

namespace bpds {

using Digest = std::array<uint8_t, 32>;

Digest sha256(ByteView data);

inline Digest sha256(const Bytes& data) { return sha256(ByteView(data)); }

inline std::string digest_hex(const Digest& d) { return to_hex(ByteView(d.data(), d.size())); }

inline constexpr Digest kZeroDigest{};

}  // namespace bpds
