#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "distwave/error.hpp"
#include "distwave/transcript.hpp"

using namespace distwave;

namespace {

ProtocolRun sample_run() {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 14;
  cfg.m = 8;
  cfg.B = 300;
  cfg.s = 1.0;
  cfg.s_min = 1.0;
  cfg.mode = Mode::Adaptive;
  cfg.seed = 21;
  return run_protocol(cfg, make_signal({.s = 1.0, .truth_level = 10}), 1.0);
}

ErrorCode read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_transcript(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("transcript text round trip") {
  const ProtocolRun run = sample_run();
  std::ostringstream out;
  write_transcript(out, run.transcript);
  const std::string text = out.str();
  CHECK(text.rfind("DWTX1\nconfig_hash ", 0) == 0);
  CHECK(text.find("\nend_header\n") != std::string::npos);
  CHECK(text.find("mode=adaptive") != std::string::npos);

  std::istringstream in(text);
  const Transcript back = read_transcript(in);
  CHECK(back == run.transcript);
  const AggregatedEstimate replay = decode_transcript(back);
  CHECK(replay.estimate == run.result.estimate);
  CHECK(replay.jhat == run.result.jhat);
}

TEST_CASE("empty streams are written as a dash") {
  Transcript t;
  t.config.m = 2;
  t.config.n = 64;
  t.config.B = 100;
  t.streams.resize(2);
  std::ostringstream out;
  write_transcript(out, t);
  CHECK(out.str().find("machine 1 bits 0 -\n") != std::string::npos);
  std::istringstream in(out.str());
  CHECK(read_transcript(in) == t);
}

TEST_CASE("truncated or corrupt transcripts are rejected") {
  std::ostringstream out;
  write_transcript(out, sample_run().transcript);
  const std::string text = out.str();

  // Cut at every tenth byte of the body: always a framing error.
  const std::size_t body = text.find("end_header");
  for (std::size_t cut = body; cut + 1 < text.size(); cut += std::max<std::size_t>(1, (text.size() - body) / 10)) {
    CHECK(read_error(text.substr(0, cut)) == ErrorCode::Framing);
  }
  CHECK(read_error(text.substr(0, text.size() - 3)) == ErrorCode::Framing);
  CHECK(read_error("") == ErrorCode::Framing);
  CHECK(read_error("DWTX1\n") == ErrorCode::Framing);

  std::string tampered = text;
  const std::size_t at = tampered.find("tau=");
  tampered.replace(at, 5, "tau=9");
  CHECK(read_error(tampered) == ErrorCode::ConfigInvalid);
}

TEST_CASE("transcript files") {
  const auto dir = std::filesystem::temp_directory_path() / "distwave_transcript_test";
  std::filesystem::create_directories(dir);
  const ProtocolRun run = sample_run();
  save_transcript(dir / "t.dwt", run.transcript);
  CHECK(load_transcript(dir / "t.dwt") == run.transcript);
  try {
    load_transcript(dir / "missing.dwt");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  CHECK_THROWS_AS(save_transcript(dir / "no" / "such" / "dir.dwt", run.transcript), Error);
  std::filesystem::remove_all(dir);
}
