#include "protocol_demo.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "riskmesh/rng.hpp"
#include "riskmesh/transport.hpp"

namespace riskmesh::demo {

namespace {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes from_hex(const std::string& s) {
  Bytes out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
    int hi = nibble(s[i]), lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return {};
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

Bytes body_bytes(const httplib::Request& req) {
  return Bytes(req.body.begin(), req.body.end());
}

// One mix hop behind an HTTP facade. The driver is strictly sequential, so
// handlers never run concurrently and the state needs no locking.
struct MixActor {
  std::unique_ptr<MixServer> mix;
  std::unique_ptr<Rng> rng;
  httplib::Server http;
  std::thread th;

  ~MixActor() {
    http.stop();
    if (th.joinable()) th.join();
  }
};

// JSON-free list framing: newline-separated hex rows, trivially stable.
std::string pack_rows(const std::vector<Bytes>& rows) {
  std::string s;
  for (const Bytes& r : rows) {
    s += to_hex(r);
    s.push_back('\n');
  }
  return s;
}

std::vector<Bytes> unpack_rows(const std::string& s) {
  std::vector<Bytes> rows;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) rows.push_back(from_hex(s.substr(start, end - start)));
    start = end + 1;
  }
  return rows;
}

}  // namespace

int run_protocol_demo(const DemoOptions& opt) {
  const int n = opt.servers;
  auto crypto = make_crypto(opt.null_crypto, derive_seed(opt.seed, {0x57a9e}));
  Rng script_rng(derive_seed(opt.seed, {0x57a9e, 1}));

  // Chain identity: every hop's keypair, published front to back.
  std::vector<KeyPair> kps;
  std::vector<Key256> pks;
  for (int i = 0; i < n; ++i) {
    kps.push_back(crypto->generate_keypair());
    pks.push_back(kps.back().pk);
  }

  std::vector<std::unique_ptr<MixActor>> actors;
  for (int i = 0; i < n; ++i) {
    auto a = std::make_unique<MixActor>();
    std::vector<Key256> chain(pks.begin() + i, pks.end());
    a->mix = std::make_unique<MixServer>(kps[static_cast<std::size_t>(i)], std::move(chain),
                                         opt.batch);
    a->rng = std::make_unique<Rng>(derive_seed(opt.seed, {0x57a9e, 2, static_cast<std::uint64_t>(i)}));
    actors.push_back(std::move(a));
  }
  if (opt.drop_attack) {
    // A compromised middle hop silently discards everything it receives.
    actors[static_cast<std::size_t>(n / 2)]->mix->set_drop_all_except(0xffffffffu);
  }

  MailboxServer mailbox(1 << 20);
  httplib::Server mailbox_http;
  std::thread mailbox_th;

  auto* cryp = crypto.get();
  for (int i = 0; i < n; ++i) {
    MixActor& a = *actors[static_cast<std::size_t>(i)];
    a.http.Post("/submit", [&a](const httplib::Request& req, httplib::Response& res) {
      NetId origin = static_cast<NetId>(std::stoul(req.get_header_value("X-Origin")));
      a.mix->submit(body_bytes(req), origin);
      res.set_content("ok", "text/plain");
    });
    a.http.Post("/round", [&a, cryp](const httplib::Request&, httplib::Response& res) {
      MixServer::Output out = a.mix->pump(*cryp, *a.rng);
      res.set_content("F\n" + pack_rows(out.forward) + "D\n" + pack_rows(out.deliver),
                      "text/plain");
    });
    a.http.Post("/close", [&a, cryp](const httplib::Request&, httplib::Response& res) {
      MixServer::Output out = a.mix->flush(*cryp, *a.rng);
      res.set_content("F\n" + pack_rows(out.forward) + "D\n" + pack_rows(out.deliver),
                      "text/plain");
    });
    a.http.Get("/stats", [&a](const httplib::Request&, httplib::Response& res) {
      const MixStats& s = a.mix->stats();
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%lld %lld %lld %lld %lld",
                    static_cast<long long>(s.received), static_cast<long long>(s.emitted),
                    static_cast<long long>(s.padding), static_cast<long long>(s.dropped_invalid),
                    static_cast<long long>(s.dropped_policy));
      res.set_content(buf, "text/plain");
    });
  }
  mailbox_http.Post("/deposit", [&mailbox](const httplib::Request& req, httplib::Response& res) {
    auto dep = decode_deposit(body_bytes(req));
    if (dep) mailbox.post(dep->addr, std::move(dep->ct), 0, 0, /*relay=*/true);
    res.set_content(dep ? "ok" : "bad", "text/plain");
  });
  // Loopback with tiny payloads: Nagle + delayed ACK would add ~80ms per
  // request, so disable coalescing on both ends.
  for (auto& a : actors) a->http.set_tcp_nodelay(true);
  mailbox_http.set_tcp_nodelay(true);
  mailbox_http.Get("/fetch", [&mailbox](const httplib::Request& req, httplib::Response& res) {
    Bytes raw = from_hex(req.get_param_value("addr"));
    MailboxAddress addr{};
    if (raw.size() == addr.size()) {
      std::copy(raw.begin(), raw.end(), addr.begin());
      res.set_content(pack_rows(mailbox.fetch(addr)), "text/plain");
    } else {
      res.set_content("", "text/plain");
    }
  });

  // Bind everything before any traffic; a taken port aborts the demo.
  for (int i = 0; i <= n; ++i) {
    httplib::Server& svr = i < n ? actors[static_cast<std::size_t>(i)]->http : mailbox_http;
    if (!svr.bind_to_port("127.0.0.1", opt.port_base + i)) {
      std::fprintf(stderr, "cannot bind a loopback port for actor %d\n", i);
      return 5;
    }
  }
  for (int i = 0; i < n; ++i) {
    MixActor& a = *actors[static_cast<std::size_t>(i)];
    a.th = std::thread([&a] { a.http.listen_after_bind(); });
  }
  mailbox_th = std::thread([&mailbox_http] { mailbox_http.listen_after_bind(); });
  for (int i = 0; i <= n; ++i) {
    httplib::Server& svr = i < n ? actors[static_cast<std::size_t>(i)]->http : mailbox_http;
    while (!svr.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }

  std::vector<httplib::Client> clients;
  clients.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    clients.emplace_back("127.0.0.1", opt.port_base + i);
    clients.back().set_keep_alive(true);
    clients.back().set_tcp_nodelay(true);
  }
  auto submit_to = [&](int actor, const Bytes& env, NetId origin) {
    std::string body(env.begin(), env.end());
    httplib::Headers headers{{"X-Origin", std::to_string(origin)}};
    clients[static_cast<std::size_t>(actor)].Post("/submit", headers, body, "application/octet-stream");
  };
  auto forward_output = [&](int from_actor, const std::string& body) {
    std::vector<Bytes> forward, deliver;
    std::vector<Bytes>* bucket = nullptr;
    std::size_t start = 0;
    while (start < body.size()) {
      std::size_t end = body.find('\n', start);
      if (end == std::string::npos) end = body.size();
      std::string row = body.substr(start, end - start);
      start = end + 1;
      if (row == "F") {
        bucket = &forward;
      } else if (row == "D") {
        bucket = &deliver;
      } else if (!row.empty() && bucket) {
        bucket->push_back(from_hex(row));
      }
    }
    for (const Bytes& env : forward) {
      if (from_actor + 1 < n) {
        submit_to(from_actor + 1, env, 1000 + static_cast<NetId>(from_actor));
      }
    }
    for (const Bytes& rec : deliver) {
      std::string raw(rec.begin(), rec.end());
      clients[static_cast<std::size_t>(n)].Post("/deposit", raw, "application/octet-stream");
    }
    return std::make_pair(forward.size(), deliver.size());
  };

  // Scripted traffic: each message is one sealed risk update on a fresh
  // channel; the receiving half stays here so delivery can be verified.
  std::vector<ChannelRecv> receivers;
  for (int m = 0; m < opt.messages; ++m) {
    KeyPair sender = crypto->generate_keypair();
    KeyPair receiver = crypto->generate_keypair();
    auto ch_s = make_channel(*crypto, sender, receiver.pk);
    auto ch_r = make_channel(*crypto, receiver, sender.pk);
    if (!ch_s || !ch_r) continue;
    RiskUpdate u;
    u.day = m % 14;
    u.new_level = m % 16;
    u.prior_level = -1;
    Bytes ct = seal_update(*crypto, ch_s->send, u);
    Bytes env = build_envelope(*crypto, pks, encode_deposit(ch_s->send.mailbox.address, ct));
    submit_to(0, env, static_cast<NetId>(m));
    receivers.push_back(ch_r->recv);
  }
  std::vector<Canary> canaries;
  for (int c = 0; c < opt.canaries; ++c) {
    Canary cy = make_canary(*crypto, script_rng, 0);
    Bytes env = build_envelope(*crypto, pks,
                               encode_deposit(cy.mailbox.address, canary_payload()));
    submit_to(0, env, 50000 + static_cast<NetId>(c));
    canaries.push_back(cy);
  }

  std::printf("mix chain: %d hops, batch %d, %s crypto%s\n", n, opt.batch,
              opt.null_crypto ? "null" : "real", opt.drop_attack ? ", drop attack armed" : "");
  std::printf("submitted: %d messages, %d canaries\n", opt.messages, opt.canaries);

  for (int r = 0; r < opt.rounds; ++r) {
    std::size_t moved = 0;
    for (int i = 0; i < n; ++i) {
      auto res = clients[static_cast<std::size_t>(i)].Post("/round", "", "text/plain");
      if (!res) continue;
      auto [f, d] = forward_output(i, res->body);
      moved += f + d;
    }
    std::printf("round %d: %zu envelopes moved\n", r + 1, moved);
    if (moved == 0) break;
  }
  // Epoch close: flush every hop front to back so stragglers drain fully.
  std::size_t closed = 0;
  for (int i = 0; i < n; ++i) {
    auto res = clients[static_cast<std::size_t>(i)].Post("/close", "", "text/plain");
    if (!res) continue;
    auto [f, d] = forward_output(i, res->body);
    closed += f + d;
  }
  std::printf("epoch close: %zu envelopes moved\n", closed);

  auto fetch = [&](const MailboxAddress& addr) {
    auto res = clients[static_cast<std::size_t>(n)].Get(
        ("/fetch?addr=" + to_hex(addr)).c_str());
    return res ? unpack_rows(res->body) : std::vector<Bytes>{};
  };

  int delivered = 0;
  for (ChannelRecv& rx : receivers) {
    for (const Bytes& ct : fetch(rx.mailbox.address)) {
      if (open_update(*crypto, rx, ct)) delivered += 1;
    }
  }
  int canaries_back = 0;
  for (const Canary& cy : canaries) {
    if (!fetch(cy.mailbox.address).empty()) canaries_back += 1;
  }
  const int alarms = opt.canaries - canaries_back;

  std::printf("delivered: %d/%d messages\n", delivered, opt.messages);
  std::printf("canaries: %d/%d returned, alarms: %d\n", canaries_back, opt.canaries, alarms);
  for (int i = 0; i < n; ++i) {
    auto res = clients[static_cast<std::size_t>(i)].Get("/stats");
    std::printf("hop %d stats (received emitted padding dropped_invalid dropped_policy): %s\n",
                i, res ? res->body.c_str() : "?");
  }
  if (alarms > 0) {
    std::printf("ALARM: %d canaries missing; upstream message dropping detected\n", alarms);
  }

  mailbox_http.stop();
  if (mailbox_th.joinable()) mailbox_th.join();
  return 0;
}

}  // namespace riskmesh::demo
