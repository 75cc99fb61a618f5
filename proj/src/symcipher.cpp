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

#include "bpds/symcipher.hpp"

#include <openssl/evp.h>

#include <memory>

#include "bpds/errors.hpp"

namespace bpds {

namespace {
constexpr size_t kNonceLen = 12;
constexpr size_t kTagLen = 16;

using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CtxPtr make_ctx() {
  CtxPtr ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
  if (!ctx) fail(Errc::parameter, "cipher context allocation failed");
  return ctx;
}
}  // namespace

SymKey SymKey::random(Rng& rng) {
  SymKey k;
  rng.fill(k.bytes);
  return k;
}

Bytes aead_seal(const SymKey& key, ByteView plaintext, Rng& rng) {
  Bytes out(kNonceLen + plaintext.size() + kTagLen);
  rng.fill(std::span<uint8_t>(out.data(), kNonceLen));

  CtxPtr ctx = make_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), out.data()) != 1) {
    fail(Errc::parameter, "AES-GCM init failed");
  }
  int len = 0;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data() + kNonceLen, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    fail(Errc::parameter, "AES-GCM encrypt failed");
  }
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceLen + len, &fin) != 1) {
    fail(Errc::parameter, "AES-GCM finalize failed");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + kNonceLen + plaintext.size()) != 1) {
    fail(Errc::parameter, "AES-GCM tag extraction failed");
  }
  return out;
}

Bytes aead_open(const SymKey& key, ByteView blob) {
  if (blob.size() < kNonceLen + kTagLen) fail(Errc::decrypt, "sealed blob too short");
  size_t ct_len = blob.size() - kNonceLen - kTagLen;

  CtxPtr ctx = make_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.bytes.data(), blob.data()) != 1) {
    fail(Errc::decrypt, "AES-GCM init failed");
  }
  Bytes out(ct_len);
  int len = 0;
  if (ct_len > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, blob.data() + kNonceLen,
                                      static_cast<int>(ct_len)) != 1) {
    fail(Errc::decrypt, "authenticated decryption failed");
  }
  Bytes tag(blob.begin() + kNonceLen + ct_len, blob.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen, tag.data()) != 1) {
    fail(Errc::decrypt, "authenticated decryption failed");
  }
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) {
    fail(Errc::decrypt, "authenticated decryption failed");
  }
  return out;
}

}  // namespace bpds
