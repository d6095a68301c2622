#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace riskmesh {

using AgentId = std::int32_t;
using LocationId = std::int32_t;
using ZoneId = std::int32_t;

inline constexpr int kSlotMinutes = 15;
inline constexpr int kSlotsPerDay = 96;
// Agents are asleep (and produce no contacts) before this slot, i.e. 00:00-07:00.
inline constexpr int kFirstWakingSlot = 28;
inline constexpr int kRiskLevels = 16;

inline constexpr AgentId kNoAgent = -1;
inline constexpr LocationId kNoLocation = -1;
// Zone id used for rows whose real zone was folded away for anonymity.
inline constexpr ZoneId kLumpedZone = -1;

enum class LocationKind : std::uint8_t {
  household,
  store,
  park,
  hospital,
  icu,
  nursing_home,
  workplace,
  transit,
};
inline constexpr int kLocationKinds = 8;

enum class DistanceBand : std::uint8_t {
  close,   // under 1m
  medium,  // 1-2m
  far,     // beyond 2m; never transmits, never logged by the app
};

enum class Sex : std::uint8_t { female, male };

enum class InfectionStatus : std::uint8_t { susceptible, exposed, infectious, recovered };

enum class Symptom : std::uint8_t {
  fever,
  cough,
  fatigue,
  anosmia,
  aches,
  sore_throat,
  runny_nose,
  shortness_of_breath,
  headache,
  nausea,
};
inline constexpr int kSymptomCount = 10;

// One bit per Symptom value.
using SymptomSet = std::uint16_t;

inline constexpr SymptomSet symptom_bit(Symptom s) {
  return static_cast<SymptomSet>(1u << static_cast<unsigned>(s));
}
inline constexpr bool has_symptom(SymptomSet set, Symptom s) {
  return (set & symptom_bit(s)) != 0;
}
// Symptoms a seasonal cold or flu can also produce; evidence from these is
// discounted unless fever and anosmia appear together.
inline constexpr SymptomSet kColdFluShared =
    symptom_bit(Symptom::fever) | symptom_bit(Symptom::cough) | symptom_bit(Symptom::fatigue) |
    symptom_bit(Symptom::aches) | symptom_bit(Symptom::sore_throat) |
    symptom_bit(Symptom::runny_nose) | symptom_bit(Symptom::headache);

const char* to_string(LocationKind k);
const char* to_string(DistanceBand b);
const char* to_string(Symptom s);
LocationKind location_kind_from_string(const std::string& s);

// Configuration problems carry the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace riskmesh
