#include "riskmesh/aggregation.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskmesh {

int mobility_nibble(int outings, bool hygiene) {
  int idx = std::clamp(outings, 0, 7);
  return idx * 2 + (hygiene ? 1 : 0);
}

std::vector<ZoneId> lump_small_zones(const std::vector<long>& zone_populations) {
  std::vector<ZoneId> map(zone_populations.size(), kLumpedZone);
  for (std::size_t z = 0; z < zone_populations.size(); ++z) {
    if (zone_populations[z] >= kAnonymityFloor) map[z] = static_cast<ZoneId>(z);
  }
  return map;
}

Aggregator::Aggregator(std::vector<long> zone_populations)
    : zone_map_(lump_small_zones(zone_populations)) {}

ZoneId Aggregator::map_zone(ZoneId z) const {
  if (z < 0 || static_cast<std::size_t>(z) >= zone_map_.size()) return kLumpedZone;
  return zone_map_[static_cast<std::size_t>(z)];
}

namespace {

void check_level(int level) {
  if (level < 0 || level >= kRiskLevels) throw std::invalid_argument("risk level out of range");
}

// A correction replaces one level tick with another; the packet count is the
// number of reports, so it stays put.
template <typename Cell>
void apply_level(Cell& cell, int level, int old_level) {
  check_level(level);
  if (old_level >= 0) {
    check_level(old_level);
    cell.levels[static_cast<std::size_t>(old_level)] -= 1;
    cell.levels[static_cast<std::size_t>(level)] += 1;
  } else {
    cell.count += 1;
    cell.levels[static_cast<std::size_t>(level)] += 1;
  }
}

}  // namespace

void Aggregator::ingest(const HeatMapPacket& p) {
  HeatCell& cell = heat_[{p.day, map_zone(p.zone)}];
  apply_level(cell, p.level, p.old_level);
  if (p.old_level < 0) {
    if (p.mobility < 0 || p.mobility >= kRiskLevels)
      throw std::invalid_argument("mobility nibble out of range");
    cell.mobility[static_cast<std::size_t>(p.mobility)] += 1;
  }
}

void Aggregator::ingest(const FlowMapPacket& p) {
  FlowCell& cell = flow_[{p.day, map_zone(p.home_zone), map_zone(p.contact_zone)}];
  apply_level(cell, p.received_level, p.old_received_level);
}

namespace {

template <typename Cell>
void fold(Cell& into, const Cell& from) {
  into.count += from.count;
  for (std::size_t i = 0; i < from.levels.size(); ++i) into.levels[i] += from.levels[i];
  if constexpr (requires { into.mobility; }) {
    for (std::size_t i = 0; i < from.mobility.size(); ++i) into.mobility[i] += from.mobility[i];
  }
}

}  // namespace

HeatEmit Aggregator::emit_heatmap(int day) const {
  HeatEmit out;
  HeatCell lumped;
  for (const auto& [key, cell] : heat_) {
    if (key.first != day) continue;
    if (key.second != kLumpedZone && cell.count >= kAnonymityFloor) {
      out.rows.push_back({key.second, day, cell});
    } else {
      fold(lumped, cell);
    }
  }
  if (lumped.count >= kAnonymityFloor) {
    out.rows.push_back({kLumpedZone, day, lumped});
  } else {
    out.suppressed = lumped.count;
  }
  return out;
}

FlowEmit Aggregator::emit_flowmap(int day) const {
  FlowEmit out;
  FlowCell lumped;
  for (const auto& [key, cell] : flow_) {
    if (std::get<0>(key) != day) continue;
    bool big = cell.count >= kAnonymityFloor;
    bool already_lumped =
        std::get<1>(key) == kLumpedZone && std::get<2>(key) == kLumpedZone;
    if (big && !already_lumped) {
      out.rows.push_back({std::get<1>(key), std::get<2>(key), day, cell});
    } else {
      fold(lumped, cell);
    }
  }
  if (lumped.count >= kAnonymityFloor) {
    out.rows.push_back({kLumpedZone, kLumpedZone, day, lumped});
  } else {
    out.suppressed = lumped.count;
  }
  return out;
}

long Aggregator::heat_ingested(int day) const {
  long total = 0;
  for (const auto& [key, cell] : heat_)
    if (key.first == day) total += cell.count;
  return total;
}

long Aggregator::flow_ingested(int day) const {
  long total = 0;
  for (const auto& [key, cell] : flow_)
    if (std::get<0>(key) == day) total += cell.count;
  return total;
}

Pseudonym make_pseudonym(Rng& rng) {
  Pseudonym p;
  for (auto& b : p.bytes) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return p;
}

std::string to_hex(const Pseudonym& p) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(p.bytes.size() * 2);
  for (auto b : p.bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

void RetentionStore::add(PseudonymizedRecord rec) { records_.push_back(std::move(rec)); }

DeletionReport RetentionStore::expire(int now) {
  auto too_old = [now](const PseudonymizedRecord& r) {
    return now - r.received_day >= kRecordRetentionDays;
  };
  std::size_t before = records_.size();
  records_.erase(std::remove_if(records_.begin(), records_.end(), too_old), records_.end());
  return {before - records_.size(), records_.size()};
}

std::size_t RetentionStore::revoke(const Pseudonym& p) {
  auto mine = [&p](const PseudonymizedRecord& r) { return r.pseudonym == p; };
  std::size_t before = records_.size();
  records_.erase(std::remove_if(records_.begin(), records_.end(), mine), records_.end());
  return before - records_.size();
}

std::size_t RetentionStore::count_matching(const Pseudonym& p) const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(),
                    [&p](const PseudonymizedRecord& r) { return r.pseudonym == p; }));
}

std::optional<int> RetentionStore::oldest_age(int now) const {
  std::optional<int> best;
  for (const auto& r : records_) {
    int age = now - r.received_day;
    if (!best || age > *best) best = age;
  }
  return best;
}

}  // namespace riskmesh
