#include "riskmesh/transport.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace riskmesh {

namespace {

// Domain labels for one-way derivations.
constexpr std::uint8_t kDomainTokenLow = 0x01;   // lower-pk party sends on this token
constexpr std::uint8_t kDomainTokenHigh = 0x02;  // higher-pk party sends on this
constexpr std::uint8_t kDomainAddress = 0x10;
constexpr std::uint8_t kDomainKey = 0x11;

}  // namespace

Mailbox derive_mailbox(const CryptoProvider& crypto, const Key256& token) {
  Mailbox mb;
  mb.address = crypto.hash(kDomainAddress, token);
  mb.key = crypto.hash(kDomainKey, token);
  return mb;
}

std::optional<Channel> make_channel(CryptoProvider& crypto, const KeyPair& mine,
                                    const Key256& peer_pk) {
  Key256 shared;
  if (!crypto.dh(mine.sk, peer_pk, shared)) return std::nullopt;

  const bool mine_low = std::memcmp(mine.pk.data(), peer_pk.data(), mine.pk.size()) < 0;
  const Key256& lo = mine_low ? mine.pk : peer_pk;
  const Key256& hi = mine_low ? peer_pk : mine.pk;
  Bytes transcript;
  transcript.reserve(96);
  transcript.insert(transcript.end(), shared.begin(), shared.end());
  transcript.insert(transcript.end(), lo.begin(), lo.end());
  transcript.insert(transcript.end(), hi.begin(), hi.end());

  Key256 token_low = crypto.hash(kDomainTokenLow, transcript);
  Key256 token_high = crypto.hash(kDomainTokenHigh, transcript);

  Channel ch;
  ch.send.token = mine_low ? token_low : token_high;
  ch.recv.token = mine_low ? token_high : token_low;
  ch.send.mailbox = derive_mailbox(crypto, ch.send.token);
  ch.recv.mailbox = derive_mailbox(crypto, ch.recv.token);
  return ch;
}

Bytes encode_risk_update(const CryptoProvider& crypto, const Key256& send_token,
                         const RiskUpdate& u) {
  Bytes plain(8);
  plain[0] = static_cast<std::uint8_t>(u.day & 0xff);
  plain[1] = static_cast<std::uint8_t>((u.day >> 8) & 0xff);
  plain[2] = static_cast<std::uint8_t>(u.new_level & 0xff);
  plain[3] = u.prior_level < 0 ? 0xff : static_cast<std::uint8_t>(u.prior_level & 0xff);
  std::uint32_t c = u.counter;
  std::memcpy(plain.data() + 4, &c, 4);
  auto tag = crypto.mac(send_token, plain);
  plain.insert(plain.end(), tag.begin(), tag.end());
  return plain;
}

std::optional<RiskUpdate> decode_risk_update(const CryptoProvider& crypto,
                                             const Key256& recv_token,
                                             std::span<const std::uint8_t> plain) {
  if (plain.size() != 24) return std::nullopt;
  auto expect = crypto.mac(recv_token, plain.subspan(0, 8));
  if (std::memcmp(expect.data(), plain.data() + 8, expect.size()) != 0) return std::nullopt;
  RiskUpdate u;
  u.day = plain[0] | (plain[1] << 8);
  u.new_level = plain[2];
  u.prior_level = plain[3] == 0xff ? -1 : plain[3];
  std::uint32_t c;
  std::memcpy(&c, plain.data() + 4, 4);
  u.counter = c;
  return u;
}

Bytes seal_update(CryptoProvider& crypto, ChannelSend& ch, RiskUpdate u) {
  u.counter = ch.next_counter++;
  Bytes plain = encode_risk_update(crypto, ch.token, u);
  return crypto.secret_encrypt(ch.mailbox.key, plain);
}

std::optional<RiskUpdate> open_update(CryptoProvider& crypto, ChannelRecv& ch,
                                      std::span<const std::uint8_t> ct) {
  auto plain = crypto.secret_decrypt(ch.mailbox.key, ct);
  if (!plain) return std::nullopt;
  auto u = decode_risk_update(crypto, ch.token, *plain);
  if (!u) return std::nullopt;
  if (static_cast<std::int64_t>(u->counter) <= ch.last_counter) return std::nullopt;  // replay
  ch.last_counter = u->counter;
  return u;
}

Bytes encode_deposit(const MailboxAddress& addr, std::span<const std::uint8_t> ct) {
  Bytes out;
  out.reserve(34 + ct.size());
  out.insert(out.end(), addr.begin(), addr.end());
  out.push_back(static_cast<std::uint8_t>((ct.size() >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(ct.size() & 0xff));
  out.insert(out.end(), ct.begin(), ct.end());
  return out;
}

std::optional<Deposit> decode_deposit(std::span<const std::uint8_t> record) {
  if (record.size() < 34) return std::nullopt;
  Deposit d;
  std::memcpy(d.addr.data(), record.data(), 32);
  std::size_t len = (static_cast<std::size_t>(record[32]) << 8) | record[33];
  if (record.size() != 34 + len) return std::nullopt;
  d.ct.assign(record.begin() + 34, record.end());
  return d;
}

Bytes build_envelope(CryptoProvider& crypto, std::span<const Key256> server_pks,
                     std::span<const std::uint8_t> deposit_record) {
  if (server_pks.empty()) throw std::invalid_argument("onion route needs at least one hop");
  Bytes blob(deposit_record.begin(), deposit_record.end());
  for (std::size_t i = server_pks.size(); i-- > 0;) {
    blob = crypto.seal(server_pks[i], blob);
  }
  Bytes env;
  env.reserve(2 + blob.size());
  env.push_back(kEnvelopeVersion);
  env.push_back(static_cast<std::uint8_t>(server_pks.size()));
  env.insert(env.end(), blob.begin(), blob.end());
  return env;
}

std::optional<PeelResult> peel_envelope(CryptoProvider& crypto, const KeyPair& kp,
                                        std::span<const std::uint8_t> envelope) {
  if (envelope.size() < 2 || envelope[0] != kEnvelopeVersion || envelope[1] == 0) {
    return std::nullopt;
  }
  auto inner = crypto.seal_open(kp, envelope.subspan(2));
  if (!inner) return std::nullopt;
  PeelResult r;
  r.final_layer = envelope[1] == 1;
  if (r.final_layer) {
    r.content = std::move(*inner);
  } else {
    r.content.reserve(2 + inner->size());
    r.content.push_back(kEnvelopeVersion);
    r.content.push_back(static_cast<std::uint8_t>(envelope[1] - 1));
    r.content.insert(r.content.end(), inner->begin(), inner->end());
  }
  return r;
}

MixServer::MixServer(KeyPair kp, std::vector<Key256> chain_pks, int batch_threshold)
    : kp_(std::move(kp)),
      chain_pks_(std::move(chain_pks)),
      threshold_(static_cast<std::size_t>(batch_threshold)) {}

void MixServer::submit(Bytes envelope, NetId origin) {
  if (drop_except_ && origin != *drop_except_) {
    stats_.dropped_policy++;
    return;
  }
  stats_.received++;
  buffer_.push_back(std::move(envelope));
}

MixServer::Output MixServer::process_batch(CryptoProvider& crypto, Rng& rng, std::size_t count,
                                           bool pad) {
  Output out;
  std::vector<Bytes> batch;
  batch.reserve(threshold_);
  for (std::size_t i = 0; i < count && !buffer_.empty(); ++i) {
    batch.push_back(std::move(buffer_.front()));
    buffer_.pop_front();
  }
  if (pad) {
    while (batch.size() < threshold_) {
      // Throwaway cover envelope spanning this hop and everything downstream.
      Bytes junk_addr(32), junk_ct(24);
      for (auto& b : junk_addr) b = static_cast<std::uint8_t>(rng.next());
      for (auto& b : junk_ct) b = static_cast<std::uint8_t>(rng.next());
      MailboxAddress addr;
      std::memcpy(addr.data(), junk_addr.data(), 32);
      Bytes record = encode_deposit(addr, junk_ct);
      batch.push_back(build_envelope(crypto, chain_pks_, record));
      stats_.padding++;
    }
  }

  // Peel, then emit in uniformly shuffled order.
  struct Peeled {
    bool final_layer;
    Bytes content;
  };
  std::vector<Peeled> peeled;
  peeled.reserve(batch.size());
  for (auto& env : batch) {
    auto r = peel_envelope(crypto, kp_, env);
    if (!r) {
      stats_.dropped_invalid++;
      continue;
    }
    peeled.push_back({r->final_layer, std::move(r->content)});
  }
  rng.shuffle(peeled);
  for (auto& p : peeled) {
    stats_.emitted++;
    if (p.final_layer) {
      out.deliver.push_back(std::move(p.content));
    } else {
      out.forward.push_back(std::move(p.content));
    }
  }
  return out;
}

MixServer::Output MixServer::pump(CryptoProvider& crypto, Rng& rng) {
  Output all;
  while (buffer_.size() >= threshold_) {
    Output one = process_batch(crypto, rng, threshold_, false);
    std::move(one.forward.begin(), one.forward.end(), std::back_inserter(all.forward));
    std::move(one.deliver.begin(), one.deliver.end(), std::back_inserter(all.deliver));
  }
  return all;
}

MixServer::Output MixServer::flush(CryptoProvider& crypto, Rng& rng) {
  Output all = pump(crypto, rng);
  if (!buffer_.empty()) {
    Output one = process_batch(crypto, rng, buffer_.size(), true);
    std::move(one.forward.begin(), one.forward.end(), std::back_inserter(all.forward));
    std::move(one.deliver.begin(), one.deliver.end(), std::back_inserter(all.deliver));
  }
  return all;
}

PostStatus MailboxServer::post(const MailboxAddress& addr, Bytes ct, NetId origin, int day,
                               bool relay) {
  if (day != quota_day_) {
    quota_day_ = day;
    posts_today_.clear();
  }
  if (!relay) {
    auto& used = posts_today_[origin];
    if (used >= quota_) {
      ++throttled_;
      return PostStatus::throttled;
    }
    ++used;
  }
  slots_[addr].push_back({day, std::move(ct)});
  ++stored_;
  return PostStatus::ok;
}

std::vector<Bytes> MailboxServer::fetch(const MailboxAddress& addr) {
  auto it = slots_.find(addr);
  if (it == slots_.end()) return {};
  std::vector<Bytes> out;
  out.reserve(it->second.size());
  for (auto& rec : it->second) out.push_back(std::move(rec.second));
  stored_ -= static_cast<std::int64_t>(out.size());
  slots_.erase(it);
  return out;
}

std::size_t MailboxServer::sweep_older_than(int day) {
  std::size_t removed = 0;
  for (auto it = slots_.begin(); it != slots_.end();) {
    auto& recs = it->second;
    auto keep = std::remove_if(recs.begin(), recs.end(),
                               [day](const auto& r) { return r.first < day; });
    removed += static_cast<std::size_t>(recs.end() - keep);
    recs.erase(keep, recs.end());
    if (recs.empty())
      it = slots_.erase(it);
    else
      ++it;
  }
  stored_ -= static_cast<std::int64_t>(removed);
  return removed;
}

MixChain::MixChain(CryptoProvider& crypto, int n_servers, int batch_threshold,
                   std::int64_t daily_quota, std::uint64_t seed)
    : crypto_(crypto),
      mailbox_(daily_quota),
      rng_(derive_seed(seed, {0x31337})),
      quota_(daily_quota) {
  std::vector<KeyPair> kps;
  kps.reserve(static_cast<std::size_t>(n_servers));
  for (int i = 0; i < n_servers; ++i) kps.push_back(crypto.generate_keypair());
  for (int i = 0; i < n_servers; ++i) {
    std::vector<Key256> tail;
    for (int j = i; j < n_servers; ++j) tail.push_back(kps[static_cast<std::size_t>(j)].pk);
    servers_.emplace_back(kps[static_cast<std::size_t>(i)], std::move(tail), batch_threshold);
  }
}

std::vector<Key256> MixChain::server_pks() const {
  std::vector<Key256> pks;
  pks.reserve(servers_.size());
  for (const auto& s : servers_) pks.push_back(s.pk());
  return pks;
}

void MixChain::submit(Bytes envelope, NetId origin, double when) {
  int day = static_cast<int>(when);
  if (day != quota_day_) {
    quota_day_ = day;
    entry_posts_today_.clear();
  }
  auto& used = entry_posts_today_[origin];
  if (used >= quota_) {
    ++entry_throttled_;
    return;
  }
  ++used;
  pending_.push_back({when, seq_++, origin, std::move(envelope)});
}

void MixChain::advance(double now) {
  current_day_ = static_cast<int>(now);
  std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
    return a.when < b.when || (a.when == b.when && a.seq < b.seq);
  });
  std::size_t due = 0;
  while (due < pending_.size() && pending_[due].when <= now) ++due;
  for (std::size_t i = 0; i < due; ++i) {
    servers_[0].submit(std::move(pending_[i].envelope), pending_[i].origin);
  }
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(due));

  for (std::size_t i = 0; i < servers_.size(); ++i) {
    MixServer::Output out = servers_[i].pump(crypto_, rng_);
    for (auto& env : out.forward) {
      if (i + 1 < servers_.size()) {
        servers_[i + 1].submit(std::move(env), static_cast<NetId>(i + 1));
      }
    }
    for (auto& rec : out.deliver) {
      if (auto d = decode_deposit(rec)) {
        mailbox_.post(d->addr, std::move(d->ct), 0, current_day_, /*relay=*/true);
      }
    }
  }
}

void MixChain::close_epoch() {
  for (std::size_t i = 0; i < servers_.size(); ++i) {
    if (servers_[i].buffered() == 0) continue;
    MixServer::Output out = servers_[i].flush(crypto_, rng_);
    for (auto& env : out.forward) {
      if (i + 1 < servers_.size()) {
        servers_[i + 1].submit(std::move(env), static_cast<NetId>(i + 1));
      }
    }
    for (auto& rec : out.deliver) {
      if (auto d = decode_deposit(rec)) {
        mailbox_.post(d->addr, std::move(d->ct), 0, current_day_, /*relay=*/true);
      }
    }
  }
}

double sample_send_delay(Rng& rng) { return rng.uniform(); }

Canary make_canary(CryptoProvider& crypto, Rng& rng, int day) {
  Canary c;
  for (std::size_t i = 0; i < c.token.size(); i += 8) {
    std::uint64_t v = rng.next();
    std::memcpy(c.token.data() + i, &v, 8);
  }
  c.mailbox = derive_mailbox(crypto, c.token);
  c.sent_day = day;
  return c;
}

Bytes canary_payload() { return Bytes{'c', 'a', 'n', 'a', 'r', 'y'}; }

}  // namespace riskmesh
