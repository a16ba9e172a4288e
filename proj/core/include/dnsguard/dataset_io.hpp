#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "dnsguard/preproc.hpp"

namespace dnsguard {

/// CSV with header `throughput_bps,mean_packet_size_bytes,packet_loss,label`,
/// features at 6 decimals. Provenance goes into `# source=<id>` lines and an
/// optional free-text comment into a leading `# ` line.
///
/// Values are rounded to 6 decimals on write, so a dataset read back from a
/// file is a fixed point: read(write(read(write(d)))) == read(write(d)).
void write_dataset(std::ostream& out, const LabeledDataset& data, std::string_view comment = {});
LabeledDataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const LabeledDataset& data,
                  std::string_view comment = {});
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace dnsguard
