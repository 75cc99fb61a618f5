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

#include <cstdint>
#include <string>

#include "bpds/errors.hpp"
#include "bpds/types.hpp"

namespace bpds {

// Canonical length-prefixed binary records. All integers big-endian.

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v);
  void u64(uint64_t v);
  void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
  void raw(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  /// u32 length prefix + bytes.
  void block(ByteView data);
  void str(std::string_view s) { block(as_bytes_view(s)); }

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  static ByteView as_bytes_view(std::string_view s) {
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
  }
  Bytes buf_;
};

class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  uint8_t u8();
  uint32_t u32();
  uint64_t u64();
  int64_t i64() { return static_cast<int64_t>(u64()); }
  Bytes raw(size_t n);
  Bytes block();
  std::string str();

  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  /// Trailing garbage is a decode error.
  void expect_done() const {
    if (!done()) fail(Errc::decode, "trailing bytes in record");
  }

 private:
  void need(size_t n) const {
    if (pos_ + n > data_.size()) fail(Errc::decode, "record truncated");
  }
  ByteView data_;
  size_t pos_ = 0;
};

}  // namespace bpds
