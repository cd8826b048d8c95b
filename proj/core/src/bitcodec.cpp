#include "distwave/bitcodec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "distwave/error.hpp"

namespace distwave {

namespace {

constexpr int kMaxGammaZeros = 62;
constexpr int kMaxFractionalBits = 4096;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// |x| = mantissa * 2^exponent2 with an integer mantissa < 2^53.
struct ExactMagnitude {
  std::uint64_t mantissa = 0;
  int exponent2 = 0;
  int integer_bits = 0;

  bool bit(int position) const noexcept {
    const int shift = position - exponent2;
    if (shift < 0 || shift >= 64) return false;
    return ((mantissa >> shift) & 1U) != 0;
  }
};

ExactMagnitude decompose(double x) {
  ExactMagnitude out;
  int e = 0;
  const double fraction = std::frexp(std::abs(x), &e);  // [0.5, 1) * 2^e
  if (fraction == 0.0) return out;
  out.mantissa = static_cast<std::uint64_t>(std::ldexp(fraction, 53));
  out.exponent2 = e - 53;
  out.integer_bits = std::max(e, 0);
  return out;
}

}  // namespace

void BitString::push_back(bool bit) {
  if (size_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (size_ % 8));
  ++size_;
}

void BitString::append(const BitString& other) {
  for (std::size_t i = 0; i < other.size(); ++i) push_back(other[i]);
}

bool BitString::operator[](std::size_t index) const {
  return ((bytes_[index / 8] >> (7 - index % 8)) & 1U) != 0;
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes_.size() * 2);
  for (std::uint8_t byte : bytes_) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0x0F]);
  }
  return out;
}

BitString BitString::from_hex(const std::string& hex, std::size_t bits) {
  const std::size_t needed_bytes = (bits + 7) / 8;
  if (hex.size() != 2 * needed_bytes) {
    fail(ErrorCode::Framing, "bit record declares " + std::to_string(bits) + " bits but carries " +
                                 std::to_string(hex.size()) + " hex digits");
  }
  BitString out;
  out.bytes_.reserve(needed_bytes);
  for (std::size_t i = 0; i < needed_bytes; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::Framing, "invalid hex digit in bit record");
    out.bytes_.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  out.size_ = bits;
  if (bits % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFU >> (bits % 8));
    if ((out.bytes_.back() & pad_mask) != 0) fail(ErrorCode::Framing, "nonzero pad bits");
  }
  return out;
}

bool BitReader::read() {
  if (position_ >= bits_->size()) fail(ErrorCode::Framing, "bit stream ended mid-message");
  return (*bits_)[position_++];
}

void write_elias_gamma(BitString& out, std::uint64_t value) {
  if (value == 0) fail(ErrorCode::InvalidArgument, "Elias-gamma requires value >= 1");
  const int width = static_cast<int>(std::bit_width(value));
  for (int i = 0; i < width - 1; ++i) out.push_back(false);
  for (int i = width - 1; i >= 0; --i) out.push_back(((value >> i) & 1U) != 0);
}

std::uint64_t read_elias_gamma(BitReader& in) {
  int zeros = 0;
  while (!in.read()) {
    if (++zeros > kMaxGammaZeros) fail(ErrorCode::Framing, "Elias-gamma prefix too long");
  }
  std::uint64_t value = 1;
  for (int i = 0; i < zeros; ++i) value = (value << 1) | (in.read() ? 1U : 0U);
  return value;
}

int elias_gamma_length(std::uint64_t value) {
  return 2 * (static_cast<int>(std::bit_width(value)) - 1) + 1;
}

int CodecParams::fractional_bits() const {
  if (n < 2) fail(ErrorCode::InvalidArgument, "codec requires n >= 2");
  if (!(precision > 0.0)) fail(ErrorCode::InvalidArgument, "codec requires D > 0");
  // Guard against D log2 n landing a few ulps above an integer.
  const double raw = precision * std::log2(static_cast<double>(n));
  const double nearest = std::round(raw);
  const double digits = std::abs(raw - nearest) < 1e-9 ? nearest : std::ceil(raw);
  if (digits > kMaxFractionalBits) fail(ErrorCode::InvalidArgument, "D log2 n too large");
  return static_cast<int>(digits);
}

double CodecParams::error_bound() const {
  return std::pow(static_cast<double>(n), -precision);
}

int integer_bit_count(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "cannot encode a non-finite value");
  return decompose(x).integer_bits;
}

int payload_bits_for(double x, const CodecParams& params) {
  return 1 + std::max(1, integer_bit_count(x)) + params.fractional_bits();
}

BitMessage trans_approx_encode(double x, const CodecParams& params) {
  if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "cannot encode a non-finite value");
  const int fractional = params.fractional_bits();
  const ExactMagnitude magnitude = decompose(x);
  const int integer_bits = magnitude.integer_bits;

  BitMessage message;
  write_elias_gamma(message.bits, static_cast<std::uint64_t>(integer_bits) + 1);
  message.bits.push_back(!std::signbit(x) || x == 0.0);
  for (int k = integer_bits - 1; k >= -fractional; --k) message.bits.push_back(magnitude.bit(k));

  message.payload_bits = 1 + std::max(1, integer_bits) + fractional;
  message.framing_bits = static_cast<int>(message.bits.size()) - message.payload_bits;
  return message;
}

DecodedMessage decode_next(BitReader& in, const CodecParams& params) {
  const int fractional = params.fractional_bits();
  const std::size_t start = in.position();
  const std::uint64_t coded = read_elias_gamma(in);
  const auto integer_bits = static_cast<int>(coded - 1);
  if (integer_bits > 1100) fail(ErrorCode::Framing, "integer part exceeds double range");
  const bool non_negative = in.read();

  double magnitude = 0.0;
  for (int k = integer_bits - 1; k >= -fractional; --k) {
    if (in.read()) magnitude += std::ldexp(1.0, k);
  }

  DecodedMessage out;
  out.value = non_negative ? magnitude : -magnitude;
  out.payload_bits = 1 + std::max(1, integer_bits) + fractional;
  out.framing_bits = static_cast<int>(in.position() - start) - out.payload_bits;
  return out;
}

double trans_approx_decode(const BitMessage& message, const CodecParams& params) {
  BitReader in(message.bits);
  const DecodedMessage decoded = decode_next(in, params);
  if (in.remaining() != 0) fail(ErrorCode::Framing, "trailing bits after message");
  return decoded.value;
}

std::vector<DecodedMessage> decode_stream(const BitString& bits, const CodecParams& params,
                                          std::size_t count) {
  std::vector<DecodedMessage> out;
  out.reserve(count);
  BitReader in(bits);
  for (std::size_t i = 0; i < count; ++i) out.push_back(decode_next(in, params));
  if (in.remaining() != 0) {
    fail(ErrorCode::Framing, std::to_string(in.remaining()) + " trailing bits after " +
                                 std::to_string(count) + " messages");
  }
  return out;
}

void BudgetLedger::record(std::size_t machine, int payload_bits, int framing_bits) {
  if (machine >= machines_.size()) machines_.resize(machine + 1);
  MachineBits& entry = machines_[machine];
  entry.payload_bits += payload_bits;
  entry.framing_bits += framing_bits;
  entry.messages += 1;
}

void BudgetLedger::merge(const BudgetLedger& other) {
  if (other.machines_.size() > machines_.size()) machines_.resize(other.machines_.size());
  for (std::size_t i = 0; i < other.machines_.size(); ++i) {
    machines_[i].payload_bits += other.machines_[i].payload_bits;
    machines_[i].framing_bits += other.machines_[i].framing_bits;
    machines_[i].messages += other.machines_[i].messages;
  }
}

MachineBits BudgetLedger::totals() const noexcept {
  MachineBits total;
  for (const MachineBits& entry : machines_) {
    total.payload_bits += entry.payload_bits;
    total.framing_bits += entry.framing_bits;
    total.messages += entry.messages;
  }
  return total;
}

std::int64_t BudgetLedger::max_payload_bits() const noexcept {
  std::int64_t best = 0;
  for (const MachineBits& entry : machines_) best = std::max(best, entry.payload_bits);
  return best;
}

LengthAudit expected_length_audit(const BudgetLedger& ledger, const CodecParams& params) {
  LengthAudit audit;
  const double log_n = std::log2(static_cast<double>(params.n));
  audit.slack = 2.0 + 2.0 * std::log2(1.0 + log_n);
  audit.bound = params.precision * log_n + audit.slack;

  const MachineBits totals = ledger.totals();
  audit.messages = totals.messages;
  audit.total_payload_bits = totals.payload_bits;
  audit.total_wire_bits = totals.wire_bits();
  if (totals.messages == 0) return audit;

  audit.mean_payload_bits =
      static_cast<double>(totals.payload_bits) / static_cast<double>(totals.messages);
  audit.mean_wire_bits =
      static_cast<double>(totals.wire_bits()) / static_cast<double>(totals.messages);
  audit.violation = audit.mean_payload_bits > audit.bound;
  return audit;
}

}  // namespace distwave
