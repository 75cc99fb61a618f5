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
#include <vector>

#include "bpds/rng.hpp"

namespace testsupport {

/// Replays a fixed word sequence, then falls back to the seeded stream.
/// Lets a test force specific nonce or exponent draws.
class ScriptedRng : public bpds::Rng {
 public:
  explicit ScriptedRng(std::vector<uint64_t> script, uint64_t tail_seed = 1)
      : Rng(tail_seed), script_(std::move(script)) {}

  uint64_t next() override {
    if (pos_ < script_.size()) return script_[pos_++];
    return Rng::next();
  }

  size_t consumed() const { return pos_; }

 private:
  std::vector<uint64_t> script_;
  size_t pos_ = 0;
};

}  // namespace testsupport
