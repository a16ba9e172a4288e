#pragma once

// Discrete-event simulation of a single name server behind a 10 Mbps
// drop-tail bottleneck, with one legitimate client and one attacker
// (directly flooding, or reflecting through a second server).

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace dnsguard::simnet {

enum class AttackKind : std::uint8_t { None, DirectDoS, Amplification };

std::string_view to_string(AttackKind kind) noexcept;
std::optional<AttackKind> parse_attack_kind(std::string_view text) noexcept;

/// Partially specified scenario; make_scenario() fills the gaps.
struct ScenarioDraft {
  std::optional<double> duration;
  std::optional<double> window_len;
  std::optional<double> legit_interarrival;
  std::optional<std::uint32_t> request_size;
  std::optional<std::uint32_t> normal_response_size;
  std::optional<std::uint32_t> amp_response_size;
  std::optional<std::uint32_t> retransmit_max;
  std::optional<double> retransmit_timeout;
  std::optional<double> bottleneck_rate;
  std::optional<double> bottleneck_delay;
  std::optional<double> edge_rate;
  std::optional<double> edge_delay;
  std::optional<std::uint32_t> queue_capacity;
  std::optional<AttackKind> attack_kind;
  std::optional<double> attack_rate;
  std::optional<std::uint32_t> attack_packet_size;
  std::optional<double> attack_start_min;
  std::optional<double> attack_start_max;
  std::optional<double> attack_duration;
};

/// Validated scenario. Units: seconds, bytes, bits/second, packets.
///
/// For DirectDoS the attacker's packets (attack_packet_size bytes) reach the
/// bottleneck themselves. For Amplification attack_packet_size is the spoofed
/// query sent to the reflector, and each query returns amp_response_size bytes
/// to the target. attack_rate is packets per second at the attacker.
struct ScenarioConfig {
  double duration = 400.0;
  double window_len = 20.0;
  double legit_interarrival = 10.0;
  std::uint32_t request_size = 60;
  std::uint32_t normal_response_size = 512;
  std::uint32_t amp_response_size = 4000;
  std::uint32_t retransmit_max = 3;
  double retransmit_timeout = 5.0;
  double bottleneck_rate = 10e6;
  double bottleneck_delay = 0.010;
  double edge_rate = 100e6;
  double edge_delay = 0.010;
  std::uint32_t queue_capacity = 100;
  AttackKind attack_kind = AttackKind::None;
  double attack_rate = 0.0;
  std::uint32_t attack_packet_size = 0;
  double attack_start_min = 20.0;
  double attack_start_max = 60.0;
  double attack_duration = 320.0;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Offered attack load at the bottleneck relative to its capacity when
/// attack_rate is left unset.
inline constexpr double kDefaultAttackOverload = 1.2;

/// Fills defaults and validates. Throws Error(Errc::InvalidConfig) naming the
/// first violated constraint.
ScenarioConfig make_scenario(const ScenarioDraft& draft = {});

/// Re-checks a fully populated config.
void validate(const ScenarioConfig& config);

/// Size in bytes of one attack packet as it crosses the bottleneck.
std::uint32_t attack_size_at_target(const ScenarioConfig& config) noexcept;

enum class PacketKind : std::uint8_t { LegitRequest, LegitResponse, AttackPacket };
enum class Disposition : std::uint8_t {
  DeliveredToServer,
  DroppedAtQueue,
  DeliveredToClient,
  InFlightAtEnd,
};

std::string_view to_string(PacketKind kind) noexcept;
std::string_view to_string(Disposition disposition) noexcept;
std::optional<PacketKind> parse_packet_kind(std::string_view text) noexcept;
std::optional<Disposition> parse_disposition(std::string_view text) noexcept;

/// Legitimate transactions are numbered from 1; all attack packets share 0.
enum class FlowId : std::uint64_t {};
inline constexpr FlowId kAttackFlow{0};

/// Terminal event of one packet. Every generated packet yields exactly one.
struct PacketEvent {
  std::uint64_t seq = 0;
  std::chrono::microseconds timestamp{0};
  std::uint32_t size = 0;
  PacketKind kind = PacketKind::LegitRequest;
  Disposition disposition = Disposition::DeliveredToServer;
  FlowId flow_id{0};

  double seconds() const noexcept { return static_cast<double>(timestamp.count()) * 1e-6; }

  bool operator==(const PacketEvent&) const = default;
};

struct Interval {
  double start = 0.0;
  double end = 0.0;

  bool operator==(const Interval&) const = default;
};

struct GroundTruth {
  AttackKind attack_kind = AttackKind::None;
  std::optional<Interval> attack_interval;

  bool operator==(const GroundTruth&) const = default;
};

struct PacketTrace {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  std::vector<PacketEvent> events;
  GroundTruth truth;

  bool operator==(const PacketTrace&) const = default;
};

/// Counters collected while simulating; not part of the trace itself.
struct RunStats {
  std::uint64_t generated_requests = 0;
  std::uint64_t generated_responses = 0;
  std::uint64_t generated_attack = 0;
  std::uint64_t abandoned_flows = 0;
  std::size_t max_queue_occupancy = 0;
  std::uint64_t calendar_events = 0;

  std::uint64_t generated_total() const noexcept {
    return generated_requests + generated_responses + generated_attack;
  }
};

/// Deterministic in (config, seed). `stats` may be null.
PacketTrace run(const ScenarioConfig& config, std::uint64_t seed, RunStats* stats = nullptr);

}  // namespace dnsguard::simnet
