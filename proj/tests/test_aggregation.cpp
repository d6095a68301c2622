#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "riskmesh/aggregation.hpp"
#include "riskmesh/rng.hpp"

using namespace riskmesh;

namespace {

HeatMapPacket heat(ZoneId zone, int day, int level, int mobility = 0) {
  HeatMapPacket p;
  p.zone = zone;
  p.day = day;
  p.level = level;
  p.mobility = mobility;
  return p;
}

HeatMapPacket heat_correction(ZoneId zone, int day, int old_level, int new_level) {
  HeatMapPacket p;
  p.zone = zone;
  p.day = day;
  p.level = new_level;
  p.old_level = old_level;
  return p;
}

FlowMapPacket flow(ZoneId home, ZoneId contact, int day, int level) {
  FlowMapPacket p;
  p.home_zone = home;
  p.contact_zone = contact;
  p.day = day;
  p.received_level = level;
  return p;
}

PseudonymizedRecord record(const Pseudonym& p, int day) {
  PseudonymizedRecord r;
  r.pseudonym = p;
  r.received_day = day;
  return r;
}

}  // namespace

TEST_CASE("mobility nibble packs outings and hygiene into four bits") {
  CHECK(mobility_nibble(0, false) == 0);
  CHECK(mobility_nibble(0, true) == 1);
  CHECK(mobility_nibble(7, true) == 15);
  CHECK(mobility_nibble(40, false) == 14);  // saturates at 7 outings
  CHECK(mobility_nibble(-3, true) == 1);
  for (int outings = 0; outings < 10; ++outings) {
    for (bool hygiene : {false, true}) {
      int n = mobility_nibble(outings, hygiene);
      CHECK(n >= 0);
      CHECK(n <= 15);
      if (outings > 0) CHECK(n >= mobility_nibble(outings - 1, hygiene));
    }
  }
}

TEST_CASE("zones under one hundred residents share the lumped code") {
  std::vector<long> pops{250, 99, 100, 40, 1000};
  auto map = lump_small_zones(pops);
  CHECK(map[0] == 0);
  CHECK(map[1] == kLumpedZone);
  CHECK(map[2] == 2);
  CHECK(map[3] == kLumpedZone);
  CHECK(map[4] == 4);

  std::vector<long> all_big{100, 5000, 101};
  auto identity = lump_small_zones(all_big);
  for (std::size_t z = 0; z < identity.size(); ++z) {
    CHECK(identity[z] == static_cast<ZoneId>(z));
  }
}

TEST_CASE("heat packets accumulate into one histogram per zone and day") {
  Aggregator agg(std::vector<long>{500, 500});
  agg.ingest(heat(0, 3, 3, 2));
  agg.ingest(heat(0, 3, 5, 4));
  agg.ingest(heat(1, 3, 5, 0));
  agg.ingest(heat(0, 4, 5, 0));

  CHECK(agg.heat_ingested(3) == 3);
  CHECK(agg.heat_ingested(4) == 1);

  // Pull the raw cell through the emitter by flooding it over the floor.
  for (int i = 0; i < 98; ++i) agg.ingest(heat(0, 3, 0, 0));
  auto out = agg.emit_heatmap(3);
  auto row = std::find_if(out.rows.begin(), out.rows.end(),
                          [](const HeatRow& r) { return r.zone == 0; });
  REQUIRE(row != out.rows.end());
  CHECK(row->cell.count == 100);
  CHECK(row->cell.levels[3] == 1);
  CHECK(row->cell.levels[5] == 1);
  CHECK(row->cell.levels[0] == 98);
  CHECK(row->cell.mobility[2] == 1);
  CHECK(row->cell.mobility[4] == 1);
}

TEST_CASE("a correction moves one tick without changing the count") {
  Aggregator agg(std::vector<long>{500});
  agg.ingest(heat(0, 0, 3, 7));
  agg.ingest(heat_correction(0, 0, 3, 9));
  for (int i = 0; i < 99; ++i) agg.ingest(heat(0, 0, 1, 1));

  auto out = agg.emit_heatmap(0);
  REQUIRE(out.rows.size() == 1);
  const HeatCell& cell = out.rows[0].cell;
  CHECK(cell.count == 100);
  CHECK(cell.levels[3] == 0);
  CHECK(cell.levels[9] == 1);
  // Corrections carry no new mobility report.
  CHECK(cell.mobility[7] == 1);
  long mob_total = 0;
  for (long m : cell.mobility) mob_total += m;
  CHECK(mob_total == 100);
}

TEST_CASE("correcting level L to M equals reporting M in the first place") {
  for (int l = 0; l < kRiskLevels; ++l) {
    for (int m = 0; m < kRiskLevels; ++m) {
      Aggregator corrected(std::vector<long>{500});
      corrected.ingest(heat(0, 0, l, 5));
      corrected.ingest(heat_correction(0, 0, l, m));

      Aggregator direct(std::vector<long>{500});
      direct.ingest(heat(0, 0, m, 5));

      for (int i = 0; i < 99; ++i) {
        corrected.ingest(heat(0, 0, 0, 0));
        direct.ingest(heat(0, 0, 0, 0));
      }
      auto a = corrected.emit_heatmap(0);
      auto b = direct.emit_heatmap(0);
      REQUIRE(a.rows.size() == 1);
      REQUIRE(b.rows.size() == 1);
      CHECK(a.rows[0].cell.count == b.rows[0].cell.count);
      CHECK(a.rows[0].cell.levels == b.rows[0].cell.levels);
      CHECK(a.rows[0].cell.mobility == b.rows[0].cell.mobility);
    }
  }
}

TEST_CASE("flow corrections obey the same replacement identity") {
  for (int l : {0, 4, 15}) {
    for (int m : {0, 9, 15}) {
      Aggregator corrected(std::vector<long>{500, 500});
      corrected.ingest(flow(0, 1, 2, l));
      FlowMapPacket fix = flow(0, 1, 2, m);
      fix.old_received_level = l;
      corrected.ingest(fix);

      Aggregator direct(std::vector<long>{500, 500});
      direct.ingest(flow(0, 1, 2, m));

      for (int i = 0; i < 99; ++i) {
        corrected.ingest(flow(0, 1, 2, 0));
        direct.ingest(flow(0, 1, 2, 0));
      }
      auto a = corrected.emit_flowmap(2);
      auto b = direct.emit_flowmap(2);
      REQUIRE(a.rows.size() == 1);
      REQUIRE(b.rows.size() == 1);
      CHECK(a.rows[0].cell.levels == b.rows[0].cell.levels);
      CHECK(a.rows[0].cell.count == b.rows[0].cell.count);
    }
  }
}

TEST_CASE("malformed packets are rejected loudly") {
  Aggregator agg(std::vector<long>{500});
  CHECK_THROWS_AS(agg.ingest(heat(0, 0, 16, 0)), std::invalid_argument);
  CHECK_THROWS_AS(agg.ingest(heat(0, 0, -1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(agg.ingest(heat(0, 0, 3, 16)), std::invalid_argument);
  CHECK_THROWS_AS(agg.ingest(flow(0, 0, 0, 99)), std::invalid_argument);
}

TEST_CASE("packets for unknown zones fold into the lumped row") {
  Aggregator agg(std::vector<long>{500});
  CHECK(agg.map_zone(7) == kLumpedZone);
  CHECK(agg.map_zone(-4) == kLumpedZone);
  for (int i = 0; i < 120; ++i) agg.ingest(heat(42, 0, 1, 0));
  auto out = agg.emit_heatmap(0);
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0].zone == kLumpedZone);
  CHECK(out.rows[0].cell.count == 120);
}

TEST_CASE("an aggregator built with no zone table lumps everything") {
  Aggregator agg;
  for (int i = 0; i < 150; ++i) agg.ingest(heat(static_cast<ZoneId>(i % 5), 0, 2, 0));
  auto out = agg.emit_heatmap(0);
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0].zone == kLumpedZone);
  CHECK(out.rows[0].cell.count == 150);
}

TEST_CASE("group of 99 stays hidden, group of 100 is published") {
  Aggregator agg(std::vector<long>{500, 500});
  for (int i = 0; i < 99; ++i) agg.ingest(heat(0, 0, 1, 0));
  auto hidden = agg.emit_heatmap(0);
  CHECK(hidden.rows.empty());
  CHECK(hidden.suppressed == 99);

  agg.ingest(heat(0, 0, 1, 0));
  auto shown = agg.emit_heatmap(0);
  REQUIRE(shown.rows.size() == 1);
  CHECK(shown.rows[0].zone == 0);
  CHECK(shown.rows[0].cell.count == 100);
  CHECK(shown.suppressed == 0);
}

TEST_CASE("small groups merge into the lumped row before suppression") {
  Aggregator agg(std::vector<long>{500, 500, 500});
  for (int i = 0; i < 60; ++i) agg.ingest(heat(0, 0, 1, 0));
  for (int i = 0; i < 70; ++i) agg.ingest(heat(1, 0, 2, 0));
  auto out = agg.emit_heatmap(0);
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0].zone == kLumpedZone);
  CHECK(out.rows[0].cell.count == 130);
  CHECK(out.rows[0].cell.levels[1] == 60);
  CHECK(out.rows[0].cell.levels[2] == 70);
  CHECK(out.suppressed == 0);
}

TEST_CASE("flow rows respect the floor and never leak tiny pairs") {
  Aggregator agg(std::vector<long>{500, 500});
  agg.ingest(flow(0, 1, 0, 9));
  auto lone = agg.emit_flowmap(0);
  CHECK(lone.rows.empty());
  CHECK(lone.suppressed == 1);

  for (int i = 0; i < 150; ++i) agg.ingest(flow(1, 0, 0, 4));
  auto out = agg.emit_flowmap(0);
  REQUIRE(out.rows.size() == 1);
  CHECK(out.rows[0].home_zone == 1);
  CHECK(out.rows[0].contact_zone == 0);
  CHECK(out.rows[0].cell.count == 150);
  CHECK(out.rows[0].cell.levels[4] == 150);
  // The single 0->1 packet still hides inside the suppressed tally.
  CHECK(out.suppressed == 1);
}

TEST_CASE("no emitted row is ever below the anonymity floor") {
  Rng rng(0x4665);
  for (int stream = 0; stream < 200; ++stream) {
    const int n_zones = 1 + static_cast<int>(rng.uniform_int(0, 5));
    std::vector<long> pops;
    for (int z = 0; z < n_zones; ++z) pops.push_back(rng.uniform_int(10, 400));
    Aggregator agg(pops);

    const int packets = static_cast<int>(rng.uniform_int(0, 400));
    long heat_sent = 0;
    long flow_sent = 0;
    for (int i = 0; i < packets; ++i) {
      ZoneId z = static_cast<ZoneId>(rng.uniform_int(-1, n_zones + 1));
      if (rng.chance(0.6)) {
        agg.ingest(heat(z, 0, static_cast<int>(rng.uniform_int(0, 15)),
                        static_cast<int>(rng.uniform_int(0, 15))));
        ++heat_sent;
      } else {
        ZoneId c = static_cast<ZoneId>(rng.uniform_int(-1, n_zones + 1));
        agg.ingest(flow(z, c, 0, static_cast<int>(rng.uniform_int(0, 15))));
        ++flow_sent;
      }
    }

    auto hm = agg.emit_heatmap(0);
    long emitted = 0;
    for (const auto& row : hm.rows) {
      CHECK(row.cell.count >= kAnonymityFloor);
      emitted += row.cell.count;
    }
    CHECK(emitted + hm.suppressed == heat_sent);

    auto fm = agg.emit_flowmap(0);
    long flow_emitted = 0;
    for (const auto& row : fm.rows) {
      CHECK(row.cell.count >= kAnonymityFloor);
      flow_emitted += row.cell.count;
    }
    CHECK(flow_emitted + fm.suppressed == flow_sent);
  }
}

TEST_CASE("aggregator state stays bounded however much traffic arrives") {
  Aggregator agg(std::vector<long>{500});
  for (int i = 0; i < 100000; ++i) {
    agg.ingest(heat(0, i % 3, i % 16, i % 16));
  }
  for (int day = 0; day < 3; ++day) {
    auto out = agg.emit_heatmap(day);
    REQUIRE(out.rows.size() == 1);
    long histogram_total = 0;
    for (long v : out.rows[0].cell.levels) histogram_total += v;
    CHECK(histogram_total == out.rows[0].cell.count);
  }
}

TEST_CASE("pseudonyms are random and hex-render to 32 chars") {
  Rng rng(0x9e0);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) {
    Pseudonym p = make_pseudonym(rng);
    std::string hex = to_hex(p);
    CHECK(hex.size() == 32);
    CHECK(hex.find_first_not_of("0123456789abcdef") == std::string::npos);
    seen.insert(hex);
  }
  CHECK(seen.size() == 100);
}

TEST_CASE("records expire at ninety days, not before") {
  Rng rng(0x437);
  RetentionStore store;
  Pseudonym fresh = make_pseudonym(rng);
  Pseudonym stale = make_pseudonym(rng);
  store.add(record(stale, 10));   // age 90 at day 100
  store.add(record(fresh, 11));   // age 89 at day 100
  REQUIRE(store.size() == 2);

  auto report = store.expire(100);
  CHECK(report.expired == 1);
  CHECK(report.remaining == 1);
  CHECK(store.count_matching(stale) == 0);
  CHECK(store.count_matching(fresh) == 1);
  REQUIRE(store.oldest_age(100).has_value());
  CHECK(*store.oldest_age(100) == 89);
}

TEST_CASE("after expiry no record violates its age bound") {
  Rng rng(0x438);
  RetentionStore store;
  for (int i = 0; i < 500; ++i) {
    store.add(record(make_pseudonym(rng), static_cast<int>(rng.uniform_int(0, 200))));
  }
  const int now = 200;
  store.expire(now);
  for (const auto& r : store.records()) {
    CHECK(now - r.received_day < kRecordRetentionDays);
  }
  auto oldest = store.oldest_age(now);
  if (oldest) CHECK(*oldest < kRecordRetentionDays);
}

TEST_CASE("revocation deletes every record under a pseudonym at once") {
  Rng rng(0x439);
  RetentionStore store;
  Pseudonym mine = make_pseudonym(rng);
  Pseudonym other = make_pseudonym(rng);
  store.add(record(mine, 1));
  store.add(record(other, 2));
  store.add(record(mine, 3));
  store.add(record(mine, 5));

  CHECK(store.count_matching(mine) == 3);
  CHECK(store.revoke(mine) == 3);
  CHECK(store.count_matching(mine) == 0);
  CHECK(store.size() == 1);

  // Unknown pseudonym: polite no-op.
  Pseudonym stranger = make_pseudonym(rng);
  CHECK(store.revoke(stranger) == 0);
  CHECK(store.size() == 1);
}
