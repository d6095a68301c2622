#pragma once

#include <cstdint>

namespace riskmesh::demo {

struct DemoOptions {
  int servers = 3;
  int batch = 8;
  int messages = 100;
  int canaries = 20;
  int rounds = 8;
  bool null_crypto = false;
  bool drop_attack = false;
  int port_base = 18420;
  std::uint64_t seed = 1;
};

// Spins up the mix actors and a mailbox as loopback HTTP services, pushes
// scripted risk updates and canaries through them in client-driven lockstep
// rounds, and prints delivery and unlinkability statistics. Returns a
// process exit code (0 ok, 5 when a port cannot be bound).
int run_protocol_demo(const DemoOptions& opt);

}  // namespace riskmesh::demo
