#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "riskmesh/rng.hpp"

namespace riskmesh {

using Bytes = std::vector<std::uint8_t>;
using Key256 = std::array<std::uint8_t, 32>;

struct KeyPair {
  Key256 pk{};
  Key256 sk{};
};

// Primitive boundary for the messaging stack. The real implementation uses
// libsodium (X25519, BLAKE2b, XSalsa20-Poly1305); the null implementation is
// a fast deterministic stand-in with the same shapes, used inside large
// simulations where per-encounter curve operations would dominate runtime.
// Null mode offers no confidentiality and must never leave a simulation.
class CryptoProvider {
 public:
  virtual ~CryptoProvider() = default;

  virtual KeyPair generate_keypair() = 0;
  // X25519-style shared secret; both orders of (sk, pk) agree.
  virtual bool dh(const Key256& sk, const Key256& peer_pk, Key256& out) = 0;
  // Anonymous public-key encryption (sealed box).
  virtual Bytes seal(const Key256& pk, std::span<const std::uint8_t> msg) = 0;
  virtual std::optional<Bytes> seal_open(const KeyPair& kp, std::span<const std::uint8_t> ct) = 0;
  // Symmetric authenticated encryption.
  virtual Bytes secret_encrypt(const Key256& key, std::span<const std::uint8_t> msg) = 0;
  virtual std::optional<Bytes> secret_decrypt(const Key256& key,
                                              std::span<const std::uint8_t> ct) = 0;

  // Keyed digest with a domain label; identical in both modes.
  Key256 hash(std::uint8_t domain, std::span<const std::uint8_t> msg) const;
  Key256 hash2(std::uint8_t domain, std::span<const std::uint8_t> a,
               std::span<const std::uint8_t> b) const;
  std::array<std::uint8_t, 16> mac(const Key256& key, std::span<const std::uint8_t> msg) const;

  virtual bool is_null() const = 0;
};

std::unique_ptr<CryptoProvider> make_sodium_crypto();
std::unique_ptr<CryptoProvider> make_null_crypto(std::uint64_t seed);
std::unique_ptr<CryptoProvider> make_crypto(bool null_mode, std::uint64_t seed);

}  // namespace riskmesh
