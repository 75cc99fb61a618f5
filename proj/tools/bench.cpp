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

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpds/bignum.hpp"
#include "bpds/ces.hpp"
#include "bpds/dpos.hpp"
#include "bpds/emr.hpp"
#include "bpds/group.hpp"
#include "bpds/ledger.hpp"
#include "bpds/rng.hpp"

using namespace bpds;

namespace {

double best_ms(int reps, const std::function<void()>& fn) {
  double best = 1e30;
  for (int i = 0; i < reps; ++i) {
    auto start = std::chrono::steady_clock::now();
    fn();
    auto stop = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const char* name, size_t items, double serial_ms, double parallel_ms) {
  std::printf("%-24s %6zu items  serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n", name,
              items, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

/// A committed chain with quorum endorsements on every block, built the
/// same way the consensus driver does it.
ledger::Chain build_chain(const GroupParams& params, int blocks, Rng& rng,
                          ledger::ValidatorRegistry& reg) {
  constexpr int kAuditors = 20;
  std::vector<emr::AccountKeyPair> keys;
  reg.params = params;
  for (uint32_t i = 0; i <= kAuditors; ++i) {
    keys.push_back(emr::acct_keygen(params, emr::Role::node, rng));
    reg.node_pk[NodeId{i}] = keys.back().y;
  }

  ledger::Chain chain;
  ledger::Mempool mempool(params);
  for (int h = 0; h < blocks; ++h) {
    Time t = static_cast<Time>(h) * 10000;
    ledger::BuildResult built =
        ledger::build_block(keys[0], NodeId{0}, mempool, chain.tip(), t);
    for (uint32_t a = 1; a <= kAuditors; ++a) {
      built.block.endorsements.push_back(dpos::make_endorsement(keys[a], 1, 0, t));
    }
    ledger::append_block(chain, built.block, reg, kAuditors);
  }
  return chain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs OpenMP timings for the verification kernels"};
  std::string profile = "production";
  int blocks = 8;
  int batch = 64;
  int reps = 3;
  uint64_t seed = 1;
  app.add_option("--profile", profile, "Group profile (default production)")
      ->check(CLI::IsMember({"test", "production"}));
  app.add_option("--blocks", blocks, "Chain length for the chain_verify kernel")
      ->check(CLI::PositiveNumber);
  app.add_option("--batch", batch, "Congruence count for the CES kernel")
      ->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions per measurement (best kept)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  GroupParams params = profile == "production" ? production_profile() : test_profile();
  Rng rng(seed);
  std::printf("profile=%s openmp=%s\n", profile.c_str(), openmp_enabled() ? "on" : "off");

  // Chain verification: structure pass plus a signature pass that the
  // OpenMP kernel covers.
  ledger::ValidatorRegistry reg;
  ledger::Chain chain = build_chain(params, blocks, rng, reg);
  ledger::ChainVerifyResult serial_cv;
  ledger::ChainVerifyResult parallel_cv;
  double cv_serial = best_ms(reps, [&] { serial_cv = ledger::chain_verify_serial(chain, reg, 20); });
  double cv_parallel =
      best_ms(reps, [&] { parallel_cv = ledger::chain_verify(chain, reg, 20, Exec::parallel); });
  if (!serial_cv.ok || !parallel_cv.ok || serial_cv.first_invalid != parallel_cv.first_invalid) {
    std::fprintf(stderr, "kernel mismatch: chain_verify serial and parallel disagree\n");
    return 1;
  }
  report("chain_verify", chain.blocks.size(), cv_serial, cv_parallel);

  // CES congruence batch: one shared (v, r), `batch` exponent pairs.
  Bigint pm1 = params.p - 1;
  Bigint a = uniform_range(rng, 1, pm1 - 1);
  Bigint v = powm(params.g, a, params.p);
  Bigint k = uniform_range(rng, 1, pm1 - 1);
  while (gcd(k, pm1) != 1) k = uniform_range(rng, 1, pm1 - 1);
  Bigint r = powm(params.g, k, params.p);
  Bigint k_inv = invmod(k, pm1);

  std::vector<ces::detail::CongruenceItem> items;
  for (int i = 0; i < batch; ++i) {
    Bigint h = uniform_below(rng, pm1);
    items.push_back({h, ces::detail::delta_for(h, a, r, k_inv, params.p)});
  }
  bool serial_ok = false;
  bool parallel_ok = false;
  double ces_serial = best_ms(
      reps, [&] { serial_ok = ces::detail::check_congruences(params, v, r, items, Exec::serial); });
  double ces_parallel = best_ms(reps, [&] {
    parallel_ok = ces::detail::check_congruences(params, v, r, items, Exec::parallel);
  });
  if (!serial_ok || !parallel_ok) {
    std::fprintf(stderr, "kernel mismatch: congruence batch rejected valid items\n");
    return 1;
  }
  report("ces_congruences", items.size(), ces_serial, ces_parallel);
  return 0;
}
