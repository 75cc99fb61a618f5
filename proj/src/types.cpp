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

#include "bpds/types.hpp"

#include "bpds/errors.hpp"

namespace bpds {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) fail(Errc::parse, "odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) fail(Errc::parse, "invalid hex digit");
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return out;
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::parse: return "parse";
    case Errc::parameter: return "parameter";
    case Errc::index: return "index";
    case Errc::arity: return "arity";
    case Errc::extraction_policy: return "extraction-policy";
    case Errc::invalid_signature: return "invalid-signature";
    case Errc::access_denied: return "access-denied";
    case Errc::not_found: return "not-found";
    case Errc::decrypt: return "decrypt";
    case Errc::decode: return "decode";
    case Errc::authorization: return "authorization";
    case Errc::scheduling: return "scheduling";
    case Errc::configuration: return "configuration";
    case Errc::routing: return "routing";
    case Errc::validation: return "validation";
    case Errc::quorum: return "quorum";
    case Errc::not_released: return "not-released";
    case Errc::invariant: return "invariant";
  }
  return "unknown";
}

}  // namespace bpds
