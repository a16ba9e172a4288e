#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "dnsguard/simnet.hpp"

namespace dnsguard::simnet {

/// Text trace format:
///   `#key=value` header lines (every ScenarioConfig field, seed, attack_kind,
///   attack_start, attack_end, events), an optional `# free text` comment,
///   the column line `seq,timestamp,kind,size,disposition,flow_id`, then one
///   row per event with the timestamp in seconds to 6 decimals.
/// Config values are written in shortest round-trip form, so
/// read_trace(write_trace(t)) == t.
void write_trace(std::ostream& out, const PacketTrace& trace, std::string_view comment = {});

/// Throws ParseError with the offending line and field.
PacketTrace read_trace(std::istream& in);

void save_trace(const std::filesystem::path& path, const PacketTrace& trace,
                std::string_view comment = {});
PacketTrace load_trace(const std::filesystem::path& path);

}  // namespace dnsguard::simnet
