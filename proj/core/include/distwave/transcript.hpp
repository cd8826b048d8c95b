#pragma once

#include <filesystem>
#include <iosfwd>

#include "distwave/protocols.hpp"

namespace distwave {

// Text transcript layout:
//
//   DWTX1
//   config_hash <16 hex digits>
//   <key>=<value>            one line per ProtocolConfig key
//   end_header
//   machine <i> bits <count> <hex>
//
// The hex field packs the machine's concatenated wire messages MSB-first;
// an empty stream is written as "-".

void write_transcript(std::ostream& out, const Transcript& transcript);

/// Throws Framing on truncation or malformed records and ConfigInvalid
/// when the stored hash does not match the stored config.
Transcript read_transcript(std::istream& in);

void save_transcript(const std::filesystem::path& path, const Transcript& transcript);
Transcript load_transcript(const std::filesystem::path& path);

}  // namespace distwave
