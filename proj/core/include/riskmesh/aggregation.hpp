#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "riskmesh/rng.hpp"
#include "riskmesh/types.hpp"

namespace riskmesh {

// No emitted aggregate row may describe fewer than this many packets.
inline constexpr long kAnonymityFloor = 100;
inline constexpr int kRecordRetentionDays = 90;
inline constexpr int kPhoneLogRetentionDays = 30;

// Phone-side 4-bit mobility summary: low bit = hygiene habit, upper three
// bits = daily outing count saturated at 7.
int mobility_nibble(int outings, bool hygiene);

struct HeatMapPacket {
  ZoneId zone = kLumpedZone;
  int day = 0;
  int level = 0;
  int mobility = 0;
  int old_level = -1;  // >= 0 marks a correction to an earlier packet
};

struct FlowMapPacket {
  ZoneId home_zone = kLumpedZone;
  ZoneId contact_zone = kLumpedZone;
  int day = 0;
  int received_level = 0;
  int old_received_level = -1;
};

struct HeatCell {
  long count = 0;
  std::array<long, kRiskLevels> levels{};
  std::array<long, kRiskLevels> mobility{};
};

struct FlowCell {
  long count = 0;
  std::array<long, kRiskLevels> levels{};
};

struct HeatRow {
  ZoneId zone = kLumpedZone;
  int day = 0;
  HeatCell cell;
};

struct FlowRow {
  ZoneId home_zone = kLumpedZone;
  ZoneId contact_zone = kLumpedZone;
  int day = 0;
  FlowCell cell;
};

struct HeatEmit {
  std::vector<HeatRow> rows;
  long suppressed = 0;  // packets withheld because even the merged row was too small
};

struct FlowEmit {
  std::vector<FlowRow> rows;
  long suppressed = 0;
};

// Zones under the anonymity floor all share kLumpedZone; the mapping is
// fixed for the life of a run.
std::vector<ZoneId> lump_small_zones(const std::vector<long>& zone_populations);

// Accumulates geo packets the moment they arrive and forgets the packet.
// State is bounded by zones x days, never by traffic volume.
class Aggregator {
 public:
  Aggregator() = default;  // no known zones: everything folds into the lumped row
  explicit Aggregator(std::vector<long> zone_populations);

  void ingest(const HeatMapPacket& p);
  void ingest(const FlowMapPacket& p);

  // Day-close reads. Rows under the floor fold into the lumped row first;
  // if the fold is still under the floor it is suppressed, not shrunk.
  HeatEmit emit_heatmap(int day) const;
  FlowEmit emit_flowmap(int day) const;

  long heat_ingested(int day) const;
  long flow_ingested(int day) const;
  ZoneId map_zone(ZoneId z) const;
  const std::vector<ZoneId>& zone_map() const { return zone_map_; }

 private:
  std::vector<ZoneId> zone_map_;
  std::map<std::pair<int, ZoneId>, HeatCell> heat_;
  std::map<std::tuple<int, ZoneId, ZoneId>, FlowCell> flow_;
};

struct Pseudonym {
  std::array<std::uint8_t, 16> bytes{};
  friend bool operator==(const Pseudonym&, const Pseudonym&) = default;
};

Pseudonym make_pseudonym(Rng& rng);
std::string to_hex(const Pseudonym& p);

struct ContactSummary {
  int count = 0;
  long total_minutes = 0;
  std::array<int, kRiskLevels> level_histogram{};
};

enum class DiagnosisStatus : std::uint8_t { unknown, negative, positive };

// Consent-gated research record. Carries no tokens, no zone trace, and
// age only as a 10-year band; the pseudonym exists solely so the owner
// can revoke it later.
struct PseudonymizedRecord {
  Pseudonym pseudonym;
  int age_band = 0;
  Sex sex = Sex::female;
  std::uint32_t conditions = 0;
  std::vector<std::pair<int, SymptomSet>> symptoms_by_day;
  DiagnosisStatus diagnosis = DiagnosisStatus::unknown;
  ContactSummary contacts;
  std::array<int, 8> location_visits{};
  int received_day = 0;
};

struct DeletionReport {
  std::size_t expired = 0;
  std::size_t remaining = 0;
};

class RetentionStore {
 public:
  void add(PseudonymizedRecord rec);

  // Deletes every record whose age in days has reached the retention bound.
  DeletionReport expire(int now);

  // Consent withdrawal: drop everything under the pseudonym immediately.
  // Returns the number of records removed (0 for an unknown pseudonym).
  std::size_t revoke(const Pseudonym& p);

  std::size_t count_matching(const Pseudonym& p) const;
  std::size_t size() const { return records_.size(); }
  std::optional<int> oldest_age(int now) const;
  const std::vector<PseudonymizedRecord>& records() const { return records_; }

 private:
  std::vector<PseudonymizedRecord> records_;
};

}  // namespace riskmesh
