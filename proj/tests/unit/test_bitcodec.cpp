#include "doctest.h"

#include <cmath>
#include <random>

#include "distwave/bitcodec.hpp"
#include "distwave/error.hpp"
#include "distwave/protocols.hpp"

using namespace distwave;

namespace {

std::string bit_text(const BitString& bits) {
  std::string out;
  for (std::size_t i = 0; i < bits.size(); ++i) out.push_back(bits[i] ? '1' : '0');
  return out;
}

// Binary digits of |x| by repeated doubling in long double; exact for the
// short dyadic inputs used below.
std::string expected_fraction_bits(double x, int count) {
  long double frac = std::fabs(static_cast<long double>(x)) - std::floor(std::fabs(x));
  std::string out;
  for (int i = 0; i < count; ++i) {
    frac *= 2;
    out.push_back(frac >= 1 ? '1' : '0');
    if (frac >= 1) frac -= 1;
  }
  return out;
}

}  // namespace

TEST_CASE("Elias-gamma round trip and length") {
  BitString bits;
  for (std::uint64_t v : {1u, 2u, 3u, 4u, 17u, 1000u}) write_elias_gamma(bits, v);
  BitReader in(bits);
  for (std::uint64_t v : {1u, 2u, 3u, 4u, 17u, 1000u}) CHECK(read_elias_gamma(in) == v);
  CHECK(in.remaining() == 0);
  CHECK(elias_gamma_length(1) == 1);
  CHECK(elias_gamma_length(4) == 5);
  BitString five;
  write_elias_gamma(five, 5);
  CHECK(bit_text(five) == "00101");
  CHECK_THROWS_AS(write_elias_gamma(five, 0), Error);
}

TEST_CASE("codec parameters") {
  CHECK(CodecParams{16, 0.5}.fractional_bits() == 2);
  CHECK(CodecParams{4, 0.5}.fractional_bits() == 1);
  CHECK(CodecParams{1 << 20, 0.5}.fractional_bits() == 10);
  CHECK(CodecParams{1000, 0.5}.fractional_bits() == 5);  // ceil(4.98)
  CHECK(CodecParams{64, 30.0}.fractional_bits() == 180);
  CHECK(CodecParams{16, 0.5}.error_bound() == 0.25);
  CHECK_THROWS_AS(CodecParams({1, 0.5}).fractional_bits(), Error);
}

TEST_CASE("encode zero") {
  const CodecParams params{16, 0.5};
  const BitMessage msg = trans_approx_encode(0.0, params);
  CHECK(bit_text(msg.bits) == "1" "1" "00");  // gamma(1), sign 1, two zero digits
  CHECK(msg.payload_bits == 2 + params.fractional_bits());
  CHECK(msg.framing_bits == 0);
  CHECK(trans_approx_decode(msg, params) == 0.0);
}

TEST_CASE("encode 2.6875 with n = 16, D = 1/2") {
  const CodecParams params{16, 0.5};
  // 2.6875 = 10.1011 in binary; two fractional digits kept.
  const BitMessage msg = trans_approx_encode(2.6875, params);
  CHECK(bit_text(msg.bits) == "011" "1" "10" "10");
  CHECK(msg.payload_bits == 1 + 2 + 2);
  CHECK(msg.framing_bits == 3);
  const double y = trans_approx_decode(msg, params);
  CHECK(y == 2.5);
  CHECK(std::abs(2.6875 - y) == 0.1875);
  CHECK(std::abs(2.6875 - y) <= params.error_bound());
}

TEST_CASE("encode -3 with n = 4, D = 1/2") {
  const CodecParams params{4, 0.5};
  const BitMessage msg = trans_approx_encode(-3.0, params);
  CHECK(bit_text(msg.bits) == "011" "0" "11" "0");
  CHECK(trans_approx_decode(msg, params) == -3.0);
}

TEST_CASE("fractional digits match an independent expansion") {
  const CodecParams params{1 << 12, 1.0};  // F = 12
  for (double x : {0.7109375, 5.1875, -0.3333, 123.456, 1e-3}) {
    const BitMessage msg = trans_approx_encode(x, params);
    const int c = integer_bit_count(x);
    const std::string text = bit_text(msg.bits);
    CHECK(text.substr(text.size() - 12) == expected_fraction_bits(x, 12));
    CHECK(text[text.size() - 12 - c - 1] == (x >= 0 ? '1' : '0'));
  }
}

TEST_CASE("non-finite inputs are rejected") {
  const CodecParams params{16, 0.5};
  for (double bad : {INFINITY, -INFINITY, NAN}) {
    try {
      trans_approx_encode(bad, params);
      FAIL("expected NonFinite");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFinite);
    }
  }
}

TEST_CASE("dyadic values round-trip exactly") {
  const CodecParams params{1 << 16, 0.5};  // F = 8
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> numerator(-(std::int64_t{1} << 28),
                                                        std::int64_t{1} << 28);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(static_cast<double>(numerator(rng)), -8);
    CHECK(trans_approx_decode(trans_approx_encode(x, params), params) == x);
  }
}

TEST_CASE("error bound, truncation and accounting over 1e5 magnitudes") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> exponent(-30.0, 30.0);
  std::uniform_int_distribution<int> sample_size(1, 24);
  std::uniform_real_distribution<double> precision(0.1, 3.0);
  int violations = 0, accounting_mismatch = 0, outward = 0;
  for (int i = 0; i < 100000; ++i) {
    const CodecParams params{std::int64_t{1} << sample_size(rng), precision(rng)};
    const double x = (i % 2 ? -1.0 : 1.0) * std::exp2(exponent(rng));
    const BitMessage msg = trans_approx_encode(x, params);
    const double y = trans_approx_decode(msg, params);
    if (!(std::abs(x - y) <= params.error_bound())) ++violations;
    if (std::abs(y) > std::abs(x)) ++outward;
    const int c = std::abs(x) >= 1.0 ? static_cast<int>(std::floor(std::log2(std::abs(x)))) + 1 : 0;
    const int closed_form = 1 + std::max(1, c) + params.fractional_bits();
    if (msg.payload_bits != closed_form || payload_bits_for(x, params) != closed_form) {
      ++accounting_mismatch;
    }
    if (msg.total_bits() != static_cast<std::size_t>(msg.payload_bits + msg.framing_bits)) {
      ++accounting_mismatch;
    }
  }
  CHECK(violations == 0);
  CHECK(outward == 0);
  CHECK(accounting_mismatch == 0);
}

TEST_CASE("framing is self-delimiting") {
  const CodecParams params{1 << 10, 0.5};
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 100.0);
  for (std::size_t count : {std::size_t{0}, std::size_t{1}, std::size_t{7}, std::size_t{10000}}) {
    std::vector<double> sent;
    BitString stream;
    for (std::size_t i = 0; i < count; ++i) {
      const double x = normal(rng);
      const BitMessage msg = trans_approx_encode(x, params);
      sent.push_back(trans_approx_decode(msg, params));
      stream.append(msg.bits);
    }
    const auto decoded = decode_stream(stream, params, count);
    REQUIRE(decoded.size() == count);
    for (std::size_t i = 0; i < count; ++i) CHECK(decoded[i].value == sent[i]);

    if (count > 0) {
      BitString cut;
      for (std::size_t i = 0; i + 1 < stream.size(); ++i) cut.push_back(stream[i]);
      CHECK_THROWS_AS(decode_stream(cut, params, count), Error);
      BitString longer = stream;
      longer.push_back(true);
      CHECK_THROWS_AS(decode_stream(longer, params, count), Error);
    }
  }
}

TEST_CASE("hex packing") {
  BitString bits;
  for (char c : std::string("1011001110001")) bits.push_back(c == '1');
  const std::string hex = bits.to_hex();
  CHECK(hex == "b388");
  CHECK(BitString::from_hex(hex, bits.size()) == bits);
  CHECK_THROWS_AS(BitString::from_hex("b38", 13), Error);
  CHECK_THROWS_AS(BitString::from_hex("b38f", 13), Error);  // nonzero pad
  CHECK_THROWS_AS(BitString::from_hex("zz88", 13), Error);
}

TEST_CASE("budget ledger and length audit") {
  BudgetLedger empty;
  const LengthAudit none = expected_length_audit(empty, CodecParams{1 << 20, 0.5});
  CHECK(none.messages == 0);
  CHECK(none.total_wire_bits == 0);
  CHECK_FALSE(none.violation);

  const CodecParams params{1 << 12, 0.5};
  BudgetLedger ledger(3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> small(-2.0, 2.0);
  std::int64_t payload = 0;
  for (int i = 0; i < 300; ++i) {
    const BitMessage msg = trans_approx_encode(small(rng), params);
    ledger.record(static_cast<std::size_t>(i % 3), msg);
    payload += msg.payload_bits;
  }
  CHECK(ledger.totals().payload_bits == payload);
  CHECK(ledger.totals().messages == 300);
  CHECK(ledger.machine(1).messages == 100);
  const LengthAudit audit = expected_length_audit(ledger, params);
  CHECK(audit.mean_payload_bits <= 2 + params.fractional_bits());
  CHECK_FALSE(audit.violation);

  BudgetLedger other(2);
  other.record(1, 10, 2);
  ledger.merge(other);
  CHECK(ledger.totals().messages == 301);
  const MachineBits before = ledger.machine(1);
  ledger.merge(other);
  CHECK(ledger.machine(1).payload_bits == before.payload_bits + 10);
  CHECK(ledger.machine(1).framing_bits == before.framing_bits + 2);
  CHECK(ledger.totals().messages == 302);
}

TEST_CASE("mean payload for a bounded signal at n = 2^20") {
  ProtocolConfig cfg;
  cfg.n = std::int64_t{1} << 20;
  cfg.m = 16;
  cfg.B = 2000;
  cfg.s = 1.0;
  cfg.mode = Mode::NonAdaptiveI;
  const ProtocolRun run = run_protocol(cfg, make_signal({.s = 1.0, .truth_level = 12}), 1.0);
  const LengthAudit audit = expected_length_audit(run.result.ledger, cfg.codec());
  CHECK(audit.messages > 0);
  CHECK(audit.mean_payload_bits <= 0.5 * 20 + 3);
  CHECK_FALSE(audit.violation);
}
