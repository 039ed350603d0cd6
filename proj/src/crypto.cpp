#include "ranemu/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstring>
#include <memory>

#include "ranemu/errors.hpp"

namespace ranemu::crypto {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx make_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
  return ctx;
}

[[noreturn]] void ssl_error(const char* what) {
  throw Error(std::string("OpenSSL failure in ") + what);
}

const EVP_CIPHER* gcm_cipher(size_t key_len) {
  switch (key_len) {
    case 16:
      return EVP_aes_128_gcm();
    case 32:
      return EVP_aes_256_gcm();
    default:
      throw InvalidArgument("GCM key must be 16 or 32 bytes");
  }
}

const EVP_CIPHER* cbc_cipher(size_t key_len) {
  switch (key_len) {
    case 16:
      return EVP_aes_128_cbc();
    case 32:
      return EVP_aes_256_cbc();
    default:
      throw InvalidArgument("CBC key must be 16 or 32 bytes");
  }
}

// COUNT(32) || BEARER(5) || DIRECTION(1) || 26 zero bits
Bytes uu_header(const UuSecurityInputs& in) {
  if (in.bearer >= 32) throw InvalidArgument("bearer must be < 32");
  if (in.direction > 1) throw InvalidArgument("direction must be 0 or 1");
  Bytes h;
  put_u32(h, in.count);
  put_u32(h, static_cast<uint32_t>(in.bearer) << 27 |
                 static_cast<uint32_t>(in.direction) << 26);
  return h;
}

}  // namespace

Bytes nea2_crypt(const UuSecurityInputs& inputs, BytesView data) {
  if (inputs.key.size() != 16)
    throw InvalidArgument("NEA2 key must be 128 bits");
  Bytes iv = uu_header(inputs);
  iv.resize(16, 0);  // low 64 bits of the initial counter block are zero

  auto ctx = make_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr,
                         inputs.key.data(), iv.data()) != 1)
    ssl_error("nea2 init");
  Bytes out(data.size());
  int len = 0;
  if (!data.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(),
                        static_cast<int>(data.size())) != 1)
    ssl_error("nea2 update");
  return out;
}

uint32_t nia2_mac(const UuSecurityInputs& inputs, BytesView message) {
  if (inputs.key.size() != 16)
    throw InvalidArgument("NIA2 key must be 128 bits");
  Bytes input = uu_header(inputs) + message;
  Bytes mac = aes_cmac(inputs.key, input);
  size_t off = 0;
  return get_u32(mac, off);
}

namespace {

Sealed gcm_seal(BytesView key, BytesView nonce, BytesView aad,
                BytesView plaintext, size_t tag_len) {
  auto ctx = make_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), gcm_cipher(key.size()), nullptr, nullptr,
                         nullptr) != 1)
    ssl_error("gcm init");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                          static_cast<int>(nonce.size()), nullptr) != 1)
    ssl_error("gcm ivlen");
  if (EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(),
                         nonce.data()) != 1)
    ssl_error("gcm key");
  int len = 0;
  if (!aad.empty() && EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                                        static_cast<int>(aad.size())) != 1)
    ssl_error("gcm aad");
  Sealed out;
  out.ciphertext.resize(plaintext.size());
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len,
                        plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1)
    ssl_error("gcm update");
  if (EVP_EncryptFinal_ex(ctx.get(), nullptr, &len) != 1)
    ssl_error("gcm final");
  out.tag.resize(tag_len);
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                          static_cast<int>(tag_len), out.tag.data()) != 1)
    ssl_error("gcm tag");
  return out;
}

Bytes gcm_open(BytesView key, BytesView nonce, BytesView aad,
               BytesView ciphertext, BytesView tag) {
  auto ctx = make_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), gcm_cipher(key.size()), nullptr, nullptr,
                         nullptr) != 1)
    ssl_error("gcm init");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                          static_cast<int>(nonce.size()), nullptr) != 1)
    ssl_error("gcm ivlen");
  if (EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(),
                         nonce.data()) != 1)
    ssl_error("gcm key");
  int len = 0;
  if (!aad.empty() && EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                                        static_cast<int>(aad.size())) != 1)
    ssl_error("gcm aad");
  Bytes out(ciphertext.size());
  if (!ciphertext.empty() &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1)
    ssl_error("gcm update");
  Bytes tag_copy(tag.begin(), tag.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                          static_cast<int>(tag_copy.size()),
                          tag_copy.data()) != 1)
    ssl_error("gcm set tag");
  if (EVP_DecryptFinal_ex(ctx.get(), nullptr, &len) != 1)
    throw AuthenticationFailure("AEAD tag verification failed");
  return out;
}

}  // namespace

Sealed aead_seal(const SecuritySuite& suite, BytesView key, BytesView nonce,
                 BytesView aad, BytesView plaintext) {
  if (!suite.is_gcm_family())
    throw InvalidArgument("aead_seal requires a GCM-family suite");
  if (key.size() != suite.enc_key_len())
    throw InvalidArgument("AEAD key length does not match suite");
  return gcm_seal(key, nonce, aad, plaintext, suite.tag_len);
}

Bytes aead_open(const SecuritySuite& suite, BytesView key, BytesView nonce,
                BytesView aad, BytesView ciphertext, BytesView tag) {
  if (!suite.is_gcm_family())
    throw InvalidArgument("aead_open requires a GCM-family suite");
  if (key.size() != suite.enc_key_len())
    throw InvalidArgument("AEAD key length does not match suite");
  if (tag.size() != suite.tag_len)
    throw MalformedPacket("AEAD tag length does not match suite");
  return gcm_open(key, nonce, aad, ciphertext, tag);
}

Protected cbc_hmac_protect(const SecuritySuite& suite, BytesView enc_key,
                           BytesView auth_key, BytesView header, BytesView iv,
                           BytesView padded_plaintext) {
  if (enc_key.size() != suite.enc_key_len())
    throw InvalidArgument("CBC key length does not match suite");
  if (auth_key.size() != suite.auth_key_len())
    throw InvalidArgument("HMAC key length does not match suite");
  if (iv.size() != 16) throw InvalidArgument("CBC IV must be 16 bytes");
  if (padded_plaintext.size() % 16 != 0)
    throw InvalidArgument("plaintext not padded to the cipher block size");

  auto ctx = make_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), cbc_cipher(enc_key.size()), nullptr,
                         enc_key.data(), iv.data()) != 1)
    ssl_error("cbc init");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);  // ESP trailer already applied
  Protected out;
  out.ciphertext.resize(padded_plaintext.size());
  int len = 0;
  if (!padded_plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len,
                        padded_plaintext.data(),
                        static_cast<int>(padded_plaintext.size())) != 1)
    ssl_error("cbc update");
  if (EVP_EncryptFinal_ex(ctx.get(), nullptr, &len) != 1)
    ssl_error("cbc final");

  Bytes mac_input = Bytes(header.begin(), header.end()) + iv;
  mac_input = BytesView(mac_input) + out.ciphertext;
  Bytes mac = hmac_sha256(auth_key, mac_input);
  mac.resize(suite.tag_len);
  out.icv = std::move(mac);
  return out;
}

Bytes cbc_hmac_unprotect(const SecuritySuite& suite, BytesView enc_key,
                         BytesView auth_key, BytesView header, BytesView iv,
                         BytesView ciphertext, BytesView icv) {
  if (enc_key.size() != suite.enc_key_len())
    throw InvalidArgument("CBC key length does not match suite");
  if (auth_key.size() != suite.auth_key_len())
    throw InvalidArgument("HMAC key length does not match suite");
  if (icv.size() != suite.tag_len)
    throw MalformedPacket("ICV length does not match suite");
  if (ciphertext.size() % 16 != 0 || ciphertext.empty())
    throw MalformedPacket("CBC ciphertext not a positive block multiple");

  Bytes mac_input = Bytes(header.begin(), header.end()) + iv;
  mac_input = BytesView(mac_input) + ciphertext;
  Bytes mac = hmac_sha256(auth_key, mac_input);
  if (CRYPTO_memcmp(mac.data(), icv.data(), suite.tag_len) != 0)
    throw AuthenticationFailure("CBC+HMAC ICV verification failed");

  auto ctx = make_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), cbc_cipher(enc_key.size()), nullptr,
                         enc_key.data(), iv.data()) != 1)
    ssl_error("cbc init");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Bytes out(ciphertext.size());
  int len = 0;
  if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1)
    ssl_error("cbc update");
  if (EVP_DecryptFinal_ex(ctx.get(), nullptr, &len) != 1)
    ssl_error("cbc final");
  return out;
}

Bytes gmac_protect(const SecuritySuite& suite, BytesView key, BytesView nonce,
                   BytesView payload, BytesView header_aad) {
  if (suite.cipher != Cipher::kNull)
    throw InvalidArgument("gmac_protect requires a NULL-encryption suite");
  Bytes aad = Bytes(header_aad.begin(), header_aad.end()) + payload;
  return gcm_seal(key, nonce, aad, {}, suite.tag_len).tag;
}

void gmac_verify(const SecuritySuite& suite, BytesView key, BytesView nonce,
                 BytesView payload, BytesView icv, BytesView header_aad) {
  if (suite.cipher != Cipher::kNull)
    throw InvalidArgument("gmac_verify requires a NULL-encryption suite");
  if (icv.size() != suite.tag_len)
    throw MalformedPacket("GMAC ICV length does not match suite");
  Bytes aad = Bytes(header_aad.begin(), header_aad.end()) + payload;
  gcm_open(key, nonce, aad, {}, icv);  // throws on mismatch
}

Bytes esp_pad(BytesView payload, size_t align) {
  // pad so that payload + pad + 2 trailer bytes hits the alignment
  size_t pad_len = (align - (payload.size() + 2) % align) % align;
  Bytes out(payload.begin(), payload.end());
  out.reserve(payload.size() + pad_len + 2);
  for (size_t i = 1; i <= pad_len; ++i)
    out.push_back(static_cast<uint8_t>(i));
  out.push_back(static_cast<uint8_t>(pad_len));
  out.push_back(17);  // next header: UDP, the carrier of the inner GTP-U
  return out;
}

Bytes esp_unpad(BytesView padded) {
  if (padded.size() < 2) throw PaddingError("ESP trailer missing");
  uint8_t pad_len = padded[padded.size() - 2];
  if (padded.size() < 2u + pad_len)
    throw PaddingError("ESP pad length exceeds payload");
  for (size_t i = 1; i <= pad_len; ++i) {
    if (padded[padded.size() - 2 - pad_len + (i - 1)] != i)
      throw PaddingError("ESP pad bytes not monotonic");
  }
  return Bytes(padded.begin(), padded.end() - 2 - pad_len);
}

Bytes hmac_sha256(BytesView key, BytesView message) {
  unsigned int out_len = 32;
  Bytes out(out_len);
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           message.data(), message.size(), out.data(), &out_len) == nullptr)
    ssl_error("hmac");
  out.resize(out_len);
  return out;
}

Bytes aes_cmac(BytesView key, BytesView message) {
  if (key.size() != 16 && key.size() != 32)
    throw InvalidArgument("CMAC key must be 16 or 32 bytes");
  struct MacDeleter {
    void operator()(EVP_MAC* m) const { EVP_MAC_free(m); }
  };
  struct MacCtxDeleter {
    void operator()(EVP_MAC_CTX* c) const { EVP_MAC_CTX_free(c); }
  };
  std::unique_ptr<EVP_MAC, MacDeleter> mac(
      EVP_MAC_fetch(nullptr, "CMAC", nullptr));
  if (!mac) ssl_error("cmac fetch");
  std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(mac.get()));
  if (!ctx) ssl_error("cmac ctx");
  char cipher_name[] = "AES-128-CBC";
  if (key.size() == 32) std::strcpy(cipher_name, "AES-256-CBC");
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_CIPHER, cipher_name, 0),
      OSSL_PARAM_construct_end()};
  if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1)
    ssl_error("cmac init");
  if (EVP_MAC_update(ctx.get(), message.data(), message.size()) != 1)
    ssl_error("cmac update");
  size_t out_len = 16;
  Bytes out(out_len);
  if (EVP_MAC_final(ctx.get(), out.data(), &out_len, out.size()) != 1)
    ssl_error("cmac final");
  out.resize(out_len);
  return out;
}

Bytes aes_encrypt_block(BytesView key, BytesView block16) {
  if (block16.size() != 16) throw InvalidArgument("block must be 16 bytes");
  auto ctx = make_ctx();
  const EVP_CIPHER* cipher =
      key.size() == 32 ? EVP_aes_256_ecb() : EVP_aes_128_ecb();
  if (key.size() != 16 && key.size() != 32)
    throw InvalidArgument("AES key must be 16 or 32 bytes");
  if (EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key.data(), nullptr) != 1)
    ssl_error("ecb init");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Bytes out(16);
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, block16.data(), 16) != 1)
    ssl_error("ecb update");
  return out;
}

bool aes_acceleration_active() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("aes");
#elif defined(__aarch64__)
  return true;  // crypto extensions are near-universal on shipped arm64
#else
  return false;
#endif
}

}  // namespace ranemu::crypto
