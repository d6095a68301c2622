#pragma once

#include <cstdint>
#include <cstring>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "riskmesh/crypto.hpp"
#include "riskmesh/rng.hpp"

namespace riskmesh {

using MailboxAddress = Key256;
using NetId = std::uint32_t;

inline constexpr std::uint8_t kEnvelopeVersion = 0x01;

// A dead-drop slot: the address names it, the key encrypts what is stored
// there. Both are one-way derivations of a contact token with distinct
// domain labels, so holding one grants nothing about the other inputs.
struct Mailbox {
  MailboxAddress address{};
  Key256 key{};
};

Mailbox derive_mailbox(const CryptoProvider& crypto, const Key256& token);

// Outcome of the per-encounter handshake, one side's view: a token I send
// on, a token I listen on. Both parties derive the same unordered token pair
// and pick opposite directions (by public-key order), so the association
// lives only on the two handsets.
struct ChannelSend {
  Key256 token{};
  Mailbox mailbox{};
  std::uint32_t next_counter = 0;
};
struct ChannelRecv {
  Key256 token{};
  Mailbox mailbox{};
  std::int64_t last_counter = -1;  // replay floor
};
struct Channel {
  ChannelSend send;
  ChannelRecv recv;
};

std::optional<Channel> make_channel(CryptoProvider& crypto, const KeyPair& mine,
                                    const Key256& peer_pk);

// Level update for one shared encounter day.
struct RiskUpdate {
  int day = 0;
  int new_level = 0;
  int prior_level = -1;  // -1 = first report on this channel/day
  std::uint32_t counter = 0;
};

// 8-byte payload followed by a 16-byte tag keyed by the sending token.
Bytes encode_risk_update(const CryptoProvider& crypto, const Key256& send_token,
                         const RiskUpdate& u);
std::optional<RiskUpdate> decode_risk_update(const CryptoProvider& crypto,
                                             const Key256& recv_token,
                                             std::span<const std::uint8_t> plain);

// Seals the payload for the channel's mailbox and advances the counter.
Bytes seal_update(CryptoProvider& crypto, ChannelSend& ch, RiskUpdate u);
// Decrypt + authenticate + replay-check one fetched ciphertext.
std::optional<RiskUpdate> open_update(CryptoProvider& crypto, ChannelRecv& ch,
                                      std::span<const std::uint8_t> ct);

// What finally rests in a mailbox: 32-byte address, 2-byte big-endian length,
// ciphertext.
Bytes encode_deposit(const MailboxAddress& addr, std::span<const std::uint8_t> ct);
struct Deposit {
  MailboxAddress addr{};
  Bytes ct;
};
std::optional<Deposit> decode_deposit(std::span<const std::uint8_t> record);

// version byte | remaining-layer count | onion blob. The blob is the deposit
// record sealed to the last server's key, then wrapped once per earlier hop.
Bytes build_envelope(CryptoProvider& crypto, std::span<const Key256> server_pks,
                     std::span<const std::uint8_t> deposit_record);
// One peel. Yields either the next envelope or, after the last layer, the
// deposit record itself.
struct PeelResult {
  bool final_layer = false;
  Bytes content;
};
std::optional<PeelResult> peel_envelope(CryptoProvider& crypto, const KeyPair& kp,
                                        std::span<const std::uint8_t> envelope);

struct MixStats {
  std::int64_t received = 0;
  std::int64_t emitted = 0;
  std::int64_t padding = 0;
  std::int64_t dropped_invalid = 0;
  std::int64_t dropped_policy = 0;  // adversarial filtering, if enabled
};

// One onion hop. Buffers envelopes and only ever emits full batches; the
// output of a batch is uniformly shuffled. At epoch close a partial buffer is
// topped up with dummy self-built envelopes to throwaway addresses so the
// full-batch guarantee (and the batch anonymity set) also holds for the tail.
class MixServer {
 public:
  // `chain_pks` = this server's own public key followed by all downstream ones.
  MixServer(KeyPair kp, std::vector<Key256> chain_pks, int batch_threshold);

  const Key256& pk() const { return kp_.pk; }
  void submit(Bytes envelope, NetId origin);

  struct Output {
    std::vector<Bytes> forward;   // envelopes for the next hop
    std::vector<Bytes> deliver;   // final-layer deposit records
  };
  // Drains as many full batches as are buffered.
  Output pump(CryptoProvider& crypto, Rng& rng);
  // Pads the remainder to a full batch and drains everything.
  Output flush(CryptoProvider& crypto, Rng& rng);

  std::size_t buffered() const { return buffer_.size(); }
  const MixStats& stats() const { return stats_; }

  // Tracking-attack hook for demos and tests: drop every submission except
  // those from one origin.
  void set_drop_all_except(NetId keep) { drop_except_ = keep; }
  void clear_drop_policy() { drop_except_.reset(); }

 private:
  Output process_batch(CryptoProvider& crypto, Rng& rng, std::size_t count, bool pad);

  KeyPair kp_;
  std::vector<Key256> chain_pks_;
  std::size_t threshold_;
  std::deque<Bytes> buffer_;
  MixStats stats_;
  std::optional<NetId> drop_except_;
};

enum class PostStatus { ok, throttled };

// Keyed dead-drop store with a per-origin daily posting quota. The mix
// chain's final hop posts as a relay, which is exempt (the quota exists to
// throttle clients, and every client message already passed the entry quota).
class MailboxServer {
 public:
  explicit MailboxServer(std::int64_t daily_quota) : quota_(daily_quota) {}

  PostStatus post(const MailboxAddress& addr, Bytes ct, NetId origin, int day,
                  bool relay = false);
  std::vector<Bytes> fetch(const MailboxAddress& addr);
  // Garbage-collects deposits posted before `day` (unclaimed or dummy slots).
  std::size_t sweep_older_than(int day);

  std::int64_t stored() const { return stored_; }
  std::int64_t throttled() const { return throttled_; }

 private:
  struct AddrHash {
    std::size_t operator()(const MailboxAddress& a) const {
      std::size_t h;
      std::memcpy(&h, a.data(), sizeof(h));
      return h;
    }
  };
  std::int64_t quota_;
  std::int64_t stored_ = 0;
  std::int64_t throttled_ = 0;
  std::unordered_map<MailboxAddress, std::vector<std::pair<int, Bytes>>, AddrHash> slots_;
  int quota_day_ = -1;
  std::unordered_map<NetId, std::int64_t> posts_today_;
};

// Virtual-time assembly of the whole path: client -> mix chain -> mailboxes.
// Submissions carry a dispatch time (day fraction); advance() walks them
// through the chain in time order. The HTTP demo drives the same MixServer
// and MailboxServer state machines over loopback instead.
class MixChain {
 public:
  MixChain(CryptoProvider& crypto, int n_servers, int batch_threshold,
           std::int64_t daily_quota, std::uint64_t seed);

  std::vector<Key256> server_pks() const;

  // Queue an envelope for dispatch at absolute time `when` (days).
  void submit(Bytes envelope, NetId origin, double when);
  // Feeds everything due by `now` into the chain and pumps full batches.
  void advance(double now);
  // Epoch close: pad-and-flush every hop so nothing lingers overnight.
  void close_epoch();

  MailboxServer& mailbox() { return mailbox_; }
  const std::vector<MixServer>& servers() const { return servers_; }
  MixServer& server(std::size_t i) { return servers_[i]; }
  std::int64_t entry_throttled() const { return entry_throttled_; }

 private:
  struct Pending {
    double when;
    std::uint64_t seq;
    NetId origin;
    Bytes envelope;
  };

  CryptoProvider& crypto_;
  std::vector<MixServer> servers_;
  MailboxServer mailbox_;
  Rng rng_;
  std::vector<Pending> pending_;
  std::uint64_t seq_ = 0;
  std::int64_t quota_;
  int quota_day_ = -1;
  std::unordered_map<NetId, std::int64_t> entry_posts_today_;
  std::int64_t entry_throttled_ = 0;
  int current_day_ = 0;
};

double sample_send_delay(Rng& rng);  // uniform [0, 1) days

// Self-addressed probe. If an honest chain carried it, it appears at its
// mailbox by the next epoch close; a missing probe past the deadline is
// evidence of message dropping upstream.
struct Canary {
  Key256 token{};
  Mailbox mailbox{};
  int sent_day = 0;
  bool delivered = false;
};

Canary make_canary(CryptoProvider& crypto, Rng& rng, int day);
Bytes canary_payload();

}  // namespace riskmesh
