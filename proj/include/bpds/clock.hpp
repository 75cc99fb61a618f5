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

#include "bpds/types.hpp"

namespace bpds {

/// Source of simulated time. Never wall-clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Time now() const = 0;
};

class ManualClock : public Clock {
 public:
  explicit ManualClock(Time t = 0) : t_(t) {}
  Time now() const override { return t_; }
  void set(Time t) { t_ = t; }
  void advance(Time dt) { t_ += dt; }

 private:
  Time t_;
};

}  // namespace bpds
