#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace distwave {

/// Growable ordered bit sequence, packed MSB-first into bytes.
class BitString {
public:
  void push_back(bool bit);
  void append(const BitString& other);
  bool operator[](std::size_t index) const;
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  /// Lowercase hex of the packed bytes; trailing pad bits are zero.
  std::string to_hex() const;
  /// Inverse of to_hex. Throws Framing if the hex is too short for `bits`.
  static BitString from_hex(const std::string& hex, std::size_t bits);

  friend bool operator==(const BitString&, const BitString&) = default;

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

class BitReader {
public:
  explicit BitReader(const BitString& bits, std::size_t position = 0)
      : bits_(&bits), position_(position) {}

  /// Throws Framing when the stream is exhausted.
  bool read();
  std::size_t position() const noexcept { return position_; }
  std::size_t remaining() const noexcept { return bits_->size() - position_; }

private:
  const BitString* bits_;
  std::size_t position_;
};

/// Elias-gamma code for value >= 1: floor(log2 v) zeros, then v MSB-first.
void write_elias_gamma(BitString& out, std::uint64_t value);
std::uint64_t read_elias_gamma(BitReader& in);
int elias_gamma_length(std::uint64_t value);

/// Precision parameters shared by sender and receiver. The fractional
/// digit count F = ceil(D log2 n) is derived, never transmitted.
struct CodecParams {
  std::int64_t n = 2;
  double precision = 0.5;  // D

  int fractional_bits() const;
  /// The guaranteed reconstruction error bound n^-D.
  double error_bound() const;
};

/// One quantized coefficient on the wire:
///   [gamma(c + 1)] [sign] [c integer bits, MSB first] [F fractional bits]
/// where c is the number of integer bits of |x| and sign is 1 for x >= 0.
struct BitMessage {
  BitString bits;
  int payload_bits = 0;  // 1 + max(1, c) + F
  int framing_bits = 0;  // bits.size() - payload_bits

  std::size_t total_bits() const noexcept { return bits.size(); }
};

/// Number of bits in the integer part of |x|: floor(log2|x|) + 1 for
/// |x| >= 1, else 0.
int integer_bit_count(double x);

/// Closed-form payload accounting 1 + max(1, c) + F.
int payload_bits_for(double x, const CodecParams& params);

/// Keeps the sign, all integer digits and the first F fractional digits
/// of |x| (truncation toward zero). Throws NonFinite for inf/nan.
BitMessage trans_approx_encode(double x, const CodecParams& params);

/// Reconstructs (2 sign - 1) sum b_k 2^k. Throws Framing on malformed or
/// trailing bits.
double trans_approx_decode(const BitMessage& message, const CodecParams& params);

struct DecodedMessage {
  double value = 0.0;
  int payload_bits = 0;
  int framing_bits = 0;
};

/// Reads one self-delimiting message from the stream.
DecodedMessage decode_next(BitReader& in, const CodecParams& params);

/// Splits a concatenation of exactly `count` messages. Throws Framing on
/// truncation or leftover bits.
std::vector<DecodedMessage> decode_stream(const BitString& bits, const CodecParams& params,
                                          std::size_t count);

struct MachineBits {
  std::int64_t payload_bits = 0;
  std::int64_t framing_bits = 0;
  std::int64_t messages = 0;

  std::int64_t wire_bits() const noexcept { return payload_bits + framing_bits; }
  friend bool operator==(const MachineBits&, const MachineBits&) = default;
};

/// Per-machine cumulative bit counts. Single writer per machine; merge
/// after a parallel phase.
class BudgetLedger {
public:
  BudgetLedger() = default;
  explicit BudgetLedger(std::size_t machines) : machines_(machines) {}

  void record(std::size_t machine, int payload_bits, int framing_bits);
  void record(std::size_t machine, const BitMessage& message) {
    record(machine, message.payload_bits, message.framing_bits);
  }
  void merge(const BudgetLedger& other);

  std::size_t machines() const noexcept { return machines_.size(); }
  const MachineBits& machine(std::size_t index) const { return machines_.at(index); }
  MachineBits totals() const noexcept;
  std::int64_t max_payload_bits() const noexcept;

  friend bool operator==(const BudgetLedger&, const BudgetLedger&) = default;

private:
  std::vector<MachineBits> machines_;
};

struct LengthAudit {
  std::int64_t messages = 0;
  std::int64_t total_payload_bits = 0;
  std::int64_t total_wire_bits = 0;
  double mean_payload_bits = 0.0;
  double mean_wire_bits = 0.0;
  double bound = 0.0;  // D log2 n + slack
  double slack = 0.0;  // 2 + 2 log2(1 + log2 n)
  bool violation = false;
};

/// Mean bits per message against D log2 n plus the framing slack.
LengthAudit expected_length_audit(const BudgetLedger& ledger, const CodecParams& params);

}  // namespace distwave
