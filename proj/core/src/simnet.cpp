#include "dnsguard/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>

#include "dnsguard/error.hpp"
#include "dnsguard/random.hpp"

namespace dnsguard::simnet {

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::DirectDoS: return "direct_dos";
    case AttackKind::Amplification: return "amplification";
  }
  return "none";
}

std::optional<AttackKind> parse_attack_kind(std::string_view text) noexcept {
  if (text == "none") return AttackKind::None;
  if (text == "direct_dos") return AttackKind::DirectDoS;
  if (text == "amplification") return AttackKind::Amplification;
  return std::nullopt;
}

std::string_view to_string(PacketKind kind) noexcept {
  switch (kind) {
    case PacketKind::LegitRequest: return "legit_request";
    case PacketKind::LegitResponse: return "legit_response";
    case PacketKind::AttackPacket: return "attack";
  }
  return "attack";
}

std::string_view to_string(Disposition disposition) noexcept {
  switch (disposition) {
    case Disposition::DeliveredToServer: return "delivered_to_server";
    case Disposition::DroppedAtQueue: return "dropped_at_queue";
    case Disposition::DeliveredToClient: return "delivered_to_client";
    case Disposition::InFlightAtEnd: return "in_flight_at_end";
  }
  return "in_flight_at_end";
}

std::optional<PacketKind> parse_packet_kind(std::string_view text) noexcept {
  if (text == "legit_request") return PacketKind::LegitRequest;
  if (text == "legit_response") return PacketKind::LegitResponse;
  if (text == "attack") return PacketKind::AttackPacket;
  return std::nullopt;
}

std::optional<Disposition> parse_disposition(std::string_view text) noexcept {
  if (text == "delivered_to_server") return Disposition::DeliveredToServer;
  if (text == "dropped_at_queue") return Disposition::DroppedAtQueue;
  if (text == "delivered_to_client") return Disposition::DeliveredToClient;
  if (text == "in_flight_at_end") return Disposition::InFlightAtEnd;
  return std::nullopt;
}

std::uint32_t attack_size_at_target(const ScenarioConfig& config) noexcept {
  return config.attack_kind == AttackKind::Amplification ? config.amp_response_size
                                                         : config.attack_packet_size;
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(Errc::InvalidConfig, "invalid scenario: " + what);
}

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) invalid(std::string(name) + " must be > 0");
}

void require_positive(std::uint32_t value, const char* name) {
  if (value == 0) invalid(std::string(name) + " must be >= 1");
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require_positive(c.duration, "duration");
  require_positive(c.window_len, "window_len");
  require_positive(c.legit_interarrival, "legit_interarrival");
  require_positive(c.request_size, "request_size");
  require_positive(c.normal_response_size, "normal_response_size");
  require_positive(c.amp_response_size, "amp_response_size");
  if (c.amp_response_size <= 512) invalid("amp_response_size must exceed 512 bytes");
  require_positive(c.retransmit_timeout, "retransmit_timeout");
  require_positive(c.bottleneck_rate, "bottleneck_rate");
  require_positive(c.bottleneck_delay, "bottleneck_delay");
  require_positive(c.edge_rate, "edge_rate");
  require_positive(c.edge_delay, "edge_delay");
  require_positive(c.queue_capacity, "queue_capacity");
  require_positive(c.attack_rate, "attack_rate");
  require_positive(c.attack_packet_size, "attack_packet_size");
  require_positive(c.attack_duration, "attack_duration");
  if (!std::isfinite(c.attack_start_min) || !std::isfinite(c.attack_start_max) ||
      c.attack_start_min < 0.0 || c.attack_start_max < c.attack_start_min ||
      c.attack_start_max >= c.duration) {
    invalid("attack start range must satisfy 0 <= attack_start_min <= attack_start_max < duration");
  }
}

ScenarioConfig make_scenario(const ScenarioDraft& d) {
  ScenarioConfig c;
  c.duration = d.duration.value_or(c.duration);
  c.window_len = d.window_len.value_or(c.window_len);
  c.legit_interarrival = d.legit_interarrival.value_or(c.legit_interarrival);
  c.request_size = d.request_size.value_or(c.request_size);
  c.normal_response_size = d.normal_response_size.value_or(c.normal_response_size);
  c.amp_response_size = d.amp_response_size.value_or(c.amp_response_size);
  c.retransmit_max = d.retransmit_max.value_or(c.retransmit_max);
  c.retransmit_timeout = d.retransmit_timeout.value_or(c.retransmit_timeout);
  c.bottleneck_rate = d.bottleneck_rate.value_or(c.bottleneck_rate);
  c.bottleneck_delay = d.bottleneck_delay.value_or(c.bottleneck_delay);
  c.edge_rate = d.edge_rate.value_or(c.edge_rate);
  c.edge_delay = d.edge_delay.value_or(c.edge_delay);
  c.queue_capacity = d.queue_capacity.value_or(c.queue_capacity);
  c.attack_kind = d.attack_kind.value_or(c.attack_kind);
  c.attack_start_min = d.attack_start_min.value_or(c.attack_start_min);
  c.attack_start_max = d.attack_start_max.value_or(c.attack_start_max);
  c.attack_duration = d.attack_duration.value_or(c.attack_duration);

  // Direct floods use standard-size packets; reflected floods start from
  // ordinary small queries.
  c.attack_packet_size = d.attack_packet_size.value_or(
      c.attack_kind == AttackKind::Amplification ? c.request_size : c.normal_response_size);

  if (d.attack_rate) {
    c.attack_rate = *d.attack_rate;
  } else {
    const std::uint32_t at_target = attack_size_at_target(c);
    c.attack_rate = at_target == 0 ? 0.0
                                   : kDefaultAttackOverload * c.bottleneck_rate /
                                         (8.0 * static_cast<double>(at_target));
  }

  validate(c);
  return c;
}

namespace {

using Nanos = std::int64_t;

Nanos to_ns(double seconds) { return std::llround(seconds * 1e9); }

Nanos tx_time(std::uint32_t bytes, double rate_bps) {
  return to_ns(8.0 * static_cast<double>(bytes) / rate_bps);
}

enum class EventType : std::uint8_t {
  LegitSend,
  LegitTimeout,
  AttackEmit,
  RouterArrival,
  TxComplete,
  ServerArrival,
  ClientArrival,
};

struct CalendarEntry {
  Nanos time;
  std::uint64_t order;
  EventType type;
  std::uint64_t arg;
};

struct LaterFirst {
  bool operator()(const CalendarEntry& a, const CalendarEntry& b) const noexcept {
    if (a.time != b.time) return a.time > b.time;
    return a.order > b.order;
  }
};

struct Packet {
  PacketKind kind;
  std::uint32_t size;
  std::uint64_t flow;
  bool resolved = false;
};

struct Flow {
  std::uint32_t emissions = 0;
  bool answered = false;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed, RunStats& stats)
      : cfg_(config), stats_(stats), end_(to_ns(config.duration)) {
    truth_.attack_kind = cfg_.attack_kind;
    if (cfg_.attack_kind != AttackKind::None) {
      Rng rng(seed);
      const double start = cfg_.attack_start_min == cfg_.attack_start_max
                               ? cfg_.attack_start_min
                               : rng.uniform(cfg_.attack_start_min, cfg_.attack_start_max);
      const double end = std::min(start + cfg_.attack_duration, cfg_.duration);
      truth_.attack_interval = Interval{start, end};
    }
  }

  PacketTrace finish(std::uint64_t seed) {
    PacketTrace trace;
    trace.config = cfg_;
    trace.seed = seed;
    trace.truth = truth_;

    for (std::size_t id = 0; id < packets_.size(); ++id) {
      if (!packets_[id].resolved) record(id, end_, Disposition::InFlightAtEnd);
    }
    std::stable_sort(records_.begin(), records_.end(),
                     [](const PacketEvent& a, const PacketEvent& b) {
                       return a.timestamp < b.timestamp;
                     });
    for (std::size_t i = 0; i < records_.size(); ++i) records_[i].seq = i;
    trace.events = std::move(records_);
    return trace;
  }

  void simulate() {
    schedule(0, EventType::LegitSend, 1);
    if (truth_.attack_interval) {
      attack_start_ = to_ns(truth_.attack_interval->start);
      attack_end_ = to_ns(truth_.attack_interval->end);
      schedule(attack_start_, EventType::AttackEmit, 0);
    }

    while (!calendar_.empty() && calendar_.top().time <= end_) {
      const CalendarEntry entry = calendar_.top();
      calendar_.pop();
      ++stats_.calendar_events;
      now_ = entry.time;
      dispatch(entry);
    }
  }

 private:
  void schedule(Nanos time, EventType type, std::uint64_t arg) {
    calendar_.push(CalendarEntry{time, next_order_++, type, arg});
  }

  std::uint64_t new_packet(PacketKind kind, std::uint32_t size, std::uint64_t flow) {
    packets_.push_back(Packet{kind, size, flow});
    switch (kind) {
      case PacketKind::LegitRequest: ++stats_.generated_requests; break;
      case PacketKind::LegitResponse: ++stats_.generated_responses; break;
      case PacketKind::AttackPacket: ++stats_.generated_attack; break;
    }
    return packets_.size() - 1;
  }

  void record(std::uint64_t id, Nanos at, Disposition disposition) {
    Packet& p = packets_[id];
    p.resolved = true;
    PacketEvent ev;
    ev.timestamp = std::chrono::microseconds((at + 500) / 1000);
    ev.size = p.size;
    ev.kind = p.kind;
    ev.disposition = disposition;
    ev.flow_id = FlowId{p.flow};
    records_.push_back(ev);
  }

  void dispatch(const CalendarEntry& e) {
    switch (e.type) {
      case EventType::LegitSend: on_legit_send(e.arg); break;
      case EventType::LegitTimeout: on_legit_timeout(e.arg); break;
      case EventType::AttackEmit: on_attack_emit(e.arg); break;
      case EventType::RouterArrival: on_router_arrival(e.arg); break;
      case EventType::TxComplete: on_tx_complete(e.arg); break;
      case EventType::ServerArrival: on_server_arrival(e.arg); break;
      case EventType::ClientArrival: on_client_arrival(e.arg); break;
    }
  }

  Flow& flow(std::uint64_t id) {
    if (flows_.size() < id) flows_.resize(id);
    return flows_[id - 1];
  }

  void emit_request(std::uint64_t flow_id) {
    ++flow(flow_id).emissions;
    const auto id = new_packet(PacketKind::LegitRequest, cfg_.request_size, flow_id);
    schedule(now_ + tx_time(cfg_.request_size, cfg_.edge_rate) + to_ns(cfg_.edge_delay),
             EventType::RouterArrival, id);
    schedule(now_ + to_ns(cfg_.retransmit_timeout), EventType::LegitTimeout, flow_id);
  }

  void on_legit_send(std::uint64_t flow_id) {
    emit_request(flow_id);
    const Nanos next = to_ns(static_cast<double>(flow_id) * cfg_.legit_interarrival);
    if (next < end_) schedule(next, EventType::LegitSend, flow_id + 1);
  }

  void on_legit_timeout(std::uint64_t flow_id) {
    Flow& f = flow(flow_id);
    if (f.answered) return;
    if (f.emissions < 1 + cfg_.retransmit_max) {
      emit_request(flow_id);
    } else {
      ++stats_.abandoned_flows;
    }
  }

  Nanos attack_pre_router_delay() const {
    const Nanos hop = to_ns(cfg_.edge_delay);
    if (cfg_.attack_kind == AttackKind::Amplification) {
      // attacker -> router -> reflector, then reflector -> router
      return 2 * (tx_time(cfg_.attack_packet_size, cfg_.edge_rate) + hop) +
             tx_time(cfg_.amp_response_size, cfg_.edge_rate) + hop;
    }
    return tx_time(cfg_.attack_packet_size, cfg_.edge_rate) + hop;
  }

  void on_attack_emit(std::uint64_t index) {
    const auto id =
        new_packet(PacketKind::AttackPacket, attack_size_at_target(cfg_), kAttackFlow_value);
    schedule(now_ + attack_pre_router_delay(), EventType::RouterArrival, id);
    const Nanos next = attack_start_ + to_ns(static_cast<double>(index + 1) / cfg_.attack_rate);
    if (next < attack_end_) schedule(next, EventType::AttackEmit, index + 1);
  }

  void start_transmission(std::uint64_t id) {
    busy_ = true;
    schedule(now_ + tx_time(packets_[id].size, cfg_.bottleneck_rate), EventType::TxComplete, id);
  }

  void on_router_arrival(std::uint64_t id) {
    if (!busy_) {
      start_transmission(id);
      return;
    }
    if (waiting_.size() >= cfg_.queue_capacity) {
      record(id, now_, Disposition::DroppedAtQueue);
      return;
    }
    waiting_.push_back(id);
    stats_.max_queue_occupancy = std::max(stats_.max_queue_occupancy, waiting_.size());
  }

  void on_tx_complete(std::uint64_t id) {
    schedule(now_ + to_ns(cfg_.bottleneck_delay), EventType::ServerArrival, id);
    busy_ = false;
    if (!waiting_.empty()) {
      const auto next = waiting_.front();
      waiting_.pop_front();
      start_transmission(next);
    }
  }

  void on_server_arrival(std::uint64_t id) {
    record(id, now_, Disposition::DeliveredToServer);
    const Packet& p = packets_[id];
    if (p.kind != PacketKind::LegitRequest) return;
    const auto response =
        new_packet(PacketKind::LegitResponse, cfg_.normal_response_size, p.flow);
    const Nanos delay = tx_time(cfg_.normal_response_size, cfg_.bottleneck_rate) +
                        to_ns(cfg_.bottleneck_delay) +
                        tx_time(cfg_.normal_response_size, cfg_.edge_rate) +
                        to_ns(cfg_.edge_delay);
    schedule(now_ + delay, EventType::ClientArrival, response);
  }

  void on_client_arrival(std::uint64_t id) {
    record(id, now_, Disposition::DeliveredToClient);
    flow(packets_[id].flow).answered = true;
  }

  static constexpr std::uint64_t kAttackFlow_value = static_cast<std::uint64_t>(kAttackFlow);

  const ScenarioConfig& cfg_;
  RunStats& stats_;
  const Nanos end_;
  GroundTruth truth_;

  std::priority_queue<CalendarEntry, std::vector<CalendarEntry>, LaterFirst> calendar_;
  std::uint64_t next_order_ = 0;
  Nanos now_ = 0;
  Nanos attack_start_ = 0;
  Nanos attack_end_ = 0;

  std::vector<Packet> packets_;
  std::vector<Flow> flows_;
  std::deque<std::uint64_t> waiting_;
  bool busy_ = false;
  std::vector<PacketEvent> records_;
};

}  // namespace

PacketTrace run(const ScenarioConfig& config, std::uint64_t seed, RunStats* stats) {
  validate(config);
  RunStats local;
  RunStats& out = stats ? *stats : local;
  out = RunStats{};
  Simulation sim(config, seed, out);
  sim.simulate();
  return sim.finish(seed);
}

}  // namespace dnsguard::simnet
