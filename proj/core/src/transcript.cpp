#include "distwave/transcript.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "distwave/error.hpp"

namespace distwave {

namespace {

constexpr const char* kMagic = "DWTX1";

std::string hash_text(std::uint64_t hash) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016" PRIx64, hash);
  return buffer;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

void write_transcript(std::ostream& out, const Transcript& transcript) {
  out << kMagic << '\n';
  out << "config_hash " << hash_text(transcript.config.hash()) << '\n';
  for (const auto& [key, value] : transcript.config.to_key_values()) {
    out << key << '=' << value << '\n';
  }
  out << "end_header\n";
  for (std::size_t i = 0; i < transcript.streams.size(); ++i) {
    const BitString& bits = transcript.streams[i];
    out << "machine " << i << " bits " << bits.size() << ' '
        << (bits.empty() ? std::string("-") : bits.to_hex()) << '\n';
  }
}

Transcript read_transcript(std::istream& in) {
  std::string line;
  if (!next_line(in, line) || line != kMagic) fail(ErrorCode::Framing, "not a transcript file");
  if (!next_line(in, line) || line.rfind("config_hash ", 0) != 0) {
    fail(ErrorCode::Framing, "transcript header lacks config_hash");
  }
  const std::string stored_hash = line.substr(12);

  std::map<std::string, std::string> values;
  bool header_done = false;
  while (next_line(in, line)) {
    if (line == "end_header") {
      header_done = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Framing, "malformed header line: " + line);
    values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!header_done) fail(ErrorCode::Framing, "transcript header is truncated");

  Transcript transcript;
  transcript.config = ProtocolConfig::from_key_values(values);
  if (hash_text(transcript.config.hash()) != stored_hash) {
    fail(ErrorCode::ConfigInvalid, "transcript config does not match its hash");
  }

  const auto machines = static_cast<std::size_t>(transcript.config.m);
  transcript.streams.reserve(machines);
  while (next_line(in, line)) {
    if (line.empty()) continue;
    std::istringstream record(line);
    std::string tag, bits_tag, hex;
    std::size_t index = 0, bits = 0;
    if (!(record >> tag >> index >> bits_tag >> bits >> hex) || tag != "machine" ||
        bits_tag != "bits") {
      fail(ErrorCode::Framing, "malformed machine record: " + line.substr(0, 64));
    }
    if (index != transcript.streams.size()) {
      fail(ErrorCode::Framing, "machine records out of order at " + std::to_string(index));
    }
    if (index >= machines) fail(ErrorCode::Framing, "more machine records than m");
    transcript.streams.push_back(hex == "-" && bits == 0 ? BitString{}
                                                         : BitString::from_hex(hex, bits));
  }
  if (transcript.streams.size() != machines) {
    fail(ErrorCode::Framing, "transcript is truncated: " +
                                 std::to_string(transcript.streams.size()) + " of " +
                                 std::to_string(machines) + " machine records");
  }
  return transcript;
}

void save_transcript(const std::filesystem::path& path, const Transcript& transcript) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_transcript(out, transcript);
  if (!out.flush()) fail(ErrorCode::Io, "failed writing " + path.string());
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return read_transcript(in);
}

}  // namespace distwave
