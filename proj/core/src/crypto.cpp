#include "riskmesh/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace riskmesh {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

}  // namespace

Key256 CryptoProvider::hash(std::uint8_t domain, std::span<const std::uint8_t> msg) const {
  ensure_sodium();
  Key256 out;
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, out.size());
  crypto_generichash_update(&st, &domain, 1);
  crypto_generichash_update(&st, msg.data(), msg.size());
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

Key256 CryptoProvider::hash2(std::uint8_t domain, std::span<const std::uint8_t> a,
                             std::span<const std::uint8_t> b) const {
  ensure_sodium();
  Key256 out;
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, out.size());
  crypto_generichash_update(&st, &domain, 1);
  crypto_generichash_update(&st, a.data(), a.size());
  crypto_generichash_update(&st, b.data(), b.size());
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

std::array<std::uint8_t, 16> CryptoProvider::mac(const Key256& key,
                                                 std::span<const std::uint8_t> msg) const {
  ensure_sodium();
  std::array<std::uint8_t, 16> out;
  crypto_generichash(out.data(), out.size(), msg.data(), msg.size(), key.data(), key.size());
  return out;
}

namespace {

class SodiumCrypto final : public CryptoProvider {
 public:
  SodiumCrypto() { ensure_sodium(); }

  KeyPair generate_keypair() override {
    KeyPair kp;
    crypto_box_keypair(kp.pk.data(), kp.sk.data());
    return kp;
  }

  bool dh(const Key256& sk, const Key256& peer_pk, Key256& out) override {
    return crypto_scalarmult(out.data(), sk.data(), peer_pk.data()) == 0;
  }

  Bytes seal(const Key256& pk, std::span<const std::uint8_t> msg) override {
    Bytes ct(msg.size() + crypto_box_SEALBYTES);
    crypto_box_seal(ct.data(), msg.data(), msg.size(), pk.data());
    return ct;
  }

  std::optional<Bytes> seal_open(const KeyPair& kp, std::span<const std::uint8_t> ct) override {
    if (ct.size() < crypto_box_SEALBYTES) return std::nullopt;
    Bytes msg(ct.size() - crypto_box_SEALBYTES);
    if (crypto_box_seal_open(msg.data(), ct.data(), ct.size(), kp.pk.data(), kp.sk.data()) != 0) {
      return std::nullopt;
    }
    return msg;
  }

  Bytes secret_encrypt(const Key256& key, std::span<const std::uint8_t> msg) override {
    Bytes out(crypto_secretbox_NONCEBYTES + msg.size() + crypto_secretbox_MACBYTES);
    randombytes_buf(out.data(), crypto_secretbox_NONCEBYTES);
    crypto_secretbox_easy(out.data() + crypto_secretbox_NONCEBYTES, msg.data(), msg.size(),
                          out.data(), key.data());
    return out;
  }

  std::optional<Bytes> secret_decrypt(const Key256& key,
                                      std::span<const std::uint8_t> ct) override {
    if (ct.size() < crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES) return std::nullopt;
    Bytes msg(ct.size() - crypto_secretbox_NONCEBYTES - crypto_secretbox_MACBYTES);
    if (crypto_secretbox_open_easy(msg.data(), ct.data() + crypto_secretbox_NONCEBYTES,
                                   ct.size() - crypto_secretbox_NONCEBYTES, ct.data(),
                                   key.data()) != 0) {
      return std::nullopt;
    }
    return msg;
  }

  bool is_null() const override { return false; }
};

// Stand-in cipher: pk == f(sk) with an XOR "exchange" that commutes the same
// way scalar multiplication does, and framed plaintext for the box shapes.
class NullCrypto final : public CryptoProvider {
 public:
  explicit NullCrypto(std::uint64_t seed) : rng_(mix64(seed ^ 0xc0ffee)) { ensure_sodium(); }

  KeyPair generate_keypair() override {
    KeyPair kp;
    fill_random(kp.sk);
    kp.pk = hash(0x7e, kp.sk);  // one-way pk derivation
    return kp;
  }

  bool dh(const Key256& sk, const Key256& peer_pk, Key256& out) override {
    // g(sk) XOR peer_pk is symmetric because both sides XOR the two public
    // keys' preimages the same way: out = pk_self XOR pk_peer.
    Key256 own = hash(0x7e, sk);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = own[i] ^ peer_pk[i];
    return true;
  }

  Bytes seal(const Key256& pk, std::span<const std::uint8_t> msg) override {
    Bytes out;
    out.reserve(8 + msg.size());
    out.insert(out.end(), {'n', 's', 'e', 'a'});
    out.insert(out.end(), pk.begin(), pk.begin() + 4);
    out.insert(out.end(), msg.begin(), msg.end());
    return out;
  }

  std::optional<Bytes> seal_open(const KeyPair& kp, std::span<const std::uint8_t> ct) override {
    if (ct.size() < 8 || std::memcmp(ct.data(), "nsea", 4) != 0) return std::nullopt;
    if (std::memcmp(ct.data() + 4, kp.pk.data(), 4) != 0) return std::nullopt;
    return Bytes(ct.begin() + 8, ct.end());
  }

  Bytes secret_encrypt(const Key256& key, std::span<const std::uint8_t> msg) override {
    Bytes out;
    out.reserve(8 + msg.size());
    out.insert(out.end(), {'n', 's', 'e', 'c'});
    out.insert(out.end(), key.begin(), key.begin() + 4);
    out.insert(out.end(), msg.begin(), msg.end());
    return out;
  }

  std::optional<Bytes> secret_decrypt(const Key256& key,
                                      std::span<const std::uint8_t> ct) override {
    if (ct.size() < 8 || std::memcmp(ct.data(), "nsec", 4) != 0) return std::nullopt;
    if (std::memcmp(ct.data() + 4, key.data(), 4) != 0) return std::nullopt;
    return Bytes(ct.begin() + 8, ct.end());
  }

  bool is_null() const override { return true; }

 private:
  void fill_random(Key256& k) {
    for (std::size_t i = 0; i < k.size(); i += 8) {
      std::uint64_t v = rng_.next();
      std::memcpy(k.data() + i, &v, 8);
    }
  }
  Rng rng_;
};

}  // namespace

std::unique_ptr<CryptoProvider> make_sodium_crypto() { return std::make_unique<SodiumCrypto>(); }

std::unique_ptr<CryptoProvider> make_null_crypto(std::uint64_t seed) {
  return std::make_unique<NullCrypto>(seed);
}

std::unique_ptr<CryptoProvider> make_crypto(bool null_mode, std::uint64_t seed) {
  if (null_mode) return make_null_crypto(seed);
  return make_sodium_crypto();
}

}  // namespace riskmesh
