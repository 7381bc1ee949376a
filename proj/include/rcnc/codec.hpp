#pragma once

// Generation-based random linear rateless code over GF(2).
//
// A block of data is split into k equal segments (a generation). The encoder
// emits an unbounded stream of packets, each the XOR of a random nonzero subset
// of segments together with the subset's coefficient bits. A receiver keeps the
// packets it has in row-echelon form and can rebuild the block once it holds k
// linearly independent ones.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "rcnc/coefficient_vector.hpp"
#include "rcnc/error.hpp"
#include "rcnc/random.hpp"

namespace rcnc {

using Bytes = std::vector<std::uint8_t>;
using GenerationId = std::uint32_t;

// dst ^= src, element-wise. Sizes must match.
inline void xor_bytes(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src) {
  std::size_t i = 0;
  for (; i + 8 <= dst.size(); i += 8) {
    std::uint64_t a;
    std::uint64_t b;
    std::memcpy(&a, dst.data() + i, 8);
    std::memcpy(&b, src.data() + i, 8);
    a ^= b;
    std::memcpy(dst.data() + i, &a, 8);
  }
  for (; i < dst.size(); ++i) dst[i] ^= src[i];
}

struct GenerationConfig {
  std::size_t k = 1;
  std::size_t segment_size = 1;

  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

class Generation {
 public:
  Generation(GenerationId id, GenerationConfig config, Bytes padded, std::size_t original_length)
      : id_(id), config_(config), data_(std::move(padded)), original_length_(original_length) {
    if (config_.k == 0 || config_.segment_size == 0) {
      throw InvalidInput("generation needs k >= 1 and segment_size >= 1");
    }
    if (data_.size() != config_.k * config_.segment_size) {
      throw InvalidInput("generation buffer must hold exactly k * segment_size bytes");
    }
    if (original_length_ > data_.size()) {
      throw InvalidInput("original_length exceeds generation capacity");
    }
  }

  GenerationId id() const { return id_; }
  const GenerationConfig& config() const { return config_; }
  std::size_t k() const { return config_.k; }
  std::size_t segment_size() const { return config_.segment_size; }
  std::size_t original_length() const { return original_length_; }

  std::span<const std::uint8_t> segment(std::size_t j) const {
    return std::span<const std::uint8_t>(data_).subspan(j * config_.segment_size,
                                                        config_.segment_size);
  }

  // The unpadded source block.
  std::span<const std::uint8_t> source() const {
    return std::span<const std::uint8_t>(data_).first(original_length_);
  }

 private:
  GenerationId id_;
  GenerationConfig config_;
  Bytes data_;
  std::size_t original_length_;
};

// Splits `data` into k segments of ceil(len / k) bytes, zero-padding the tail.
inline Generation make_generation(std::span<const std::uint8_t> data, std::size_t k,
                                  GenerationId id) {
  if (data.empty()) throw InvalidInput("cannot build a generation from empty data");
  if (k == 0) throw InvalidInput("segment count k must be at least 1");
  const std::size_t segment_size = (data.size() + k - 1) / k;
  Bytes padded(k * segment_size, 0);
  std::memcpy(padded.data(), data.data(), data.size());
  return Generation(id, GenerationConfig{k, segment_size}, std::move(padded), data.size());
}

// Source packets that fit in one generation under a latency budget:
// ceil(bitrate * max_latency / (8 * packet_size)).
inline std::size_t compute_generation_size(double bitrate_bps, double packet_size_bytes,
                                           double max_latency_s) {
  if (!(bitrate_bps > 0) || !(packet_size_bytes > 0) || !(max_latency_s > 0)) {
    throw InvalidInput("bitrate, packet size and latency must all be positive");
  }
  const double packets = bitrate_bps * max_latency_s / (8.0 * packet_size_bytes);
  return static_cast<std::size_t>(std::ceil(packets));
}

struct CodedPacket {
  GenerationId generation_id = 0;
  CoefficientVector coefficients;
  Bytes payload;

  friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

// Combination of the generation's segments selected by `coefficients`.
inline CodedPacket encode(const Generation& generation, const CoefficientVector& coefficients) {
  if (coefficients.size() != generation.k()) {
    throw InvalidInput("coefficient vector length does not match generation k");
  }
  CodedPacket packet{generation.id(), coefficients, Bytes(generation.segment_size(), 0)};
  for (std::size_t j = coefficients.next_set(0); j < coefficients.size();
       j = coefficients.next_set(j + 1)) {
    xor_bytes(packet.payload, generation.segment(j));
  }
  return packet;
}

// Fresh packet with coefficients uniform over the nonzero vectors of GF(2)^k.
// Can be called any number of times per generation.
inline CodedPacket next_coded_packet(const Generation& generation, Rng& rng) {
  return encode(generation, CoefficientVector::random_nonzero(generation.k(), rng));
}

enum class ReceiveResult { Innovative, Redundant, Complete };

inline const char* to_string(ReceiveResult r) {
  switch (r) {
    case ReceiveResult::Innovative: return "innovative";
    case ReceiveResult::Redundant: return "redundant";
    case ReceiveResult::Complete: return "complete";
  }
  return "?";
}

// Incremental Gaussian elimination over GF(2).
//
// Each stored row's pivot is its lowest set coefficient bit and no two rows
// share a pivot. Coefficients and payloads are always XORed together, so every
// stored payload stays the combination of true segments named by its row.
class Decoder {
 public:
  struct Row {
    CoefficientVector coefficients;
    Bytes payload;
    std::size_t pivot = 0;
  };

  Decoder(GenerationId generation_id, GenerationConfig config)
      : generation_id_(generation_id), config_(config), pivot_row_(config.k, kNoRow) {
    if (config.k == 0 || config.segment_size == 0) {
      throw InvalidInput("decoder needs k >= 1 and segment_size >= 1");
    }
    rows_.reserve(config.k);
  }

  explicit Decoder(const Generation& generation) : Decoder(generation.id(), generation.config()) {}

  ReceiveResult receive(const CodedPacket& packet) {
    if (packet.generation_id != generation_id_) {
      throw ProtocolError("packet for generation " + std::to_string(packet.generation_id) +
                          " sent to decoder of generation " + std::to_string(generation_id_));
    }
    if (packet.coefficients.size() != config_.k) {
      throw ProtocolError("packet has " + std::to_string(packet.coefficients.size()) +
                          " coefficients, generation has k = " + std::to_string(config_.k));
    }
    if (packet.payload.size() != config_.segment_size) {
      throw ProtocolError("packet payload has " + std::to_string(packet.payload.size()) +
                          " bytes, generation segment_size is " +
                          std::to_string(config_.segment_size));
    }
    if (complete()) return ReceiveResult::Redundant;

    // Reduce coefficients first; payload work only happens for innovative packets.
    CoefficientVector coeffs = packet.coefficients;
    used_.clear();
    std::size_t pivot = coeffs.lowest_set();
    while (pivot < config_.k && pivot_row_[pivot] != kNoRow) {
      const std::size_t r = pivot_row_[pivot];
      coeffs ^= rows_[r].coefficients;
      used_.push_back(r);
      pivot = coeffs.next_set(pivot + 1);
    }
    if (pivot == config_.k) return ReceiveResult::Redundant;

    Bytes payload = packet.payload;
    for (std::size_t r : used_) xor_bytes(payload, rows_[r].payload);
    pivot_row_[pivot] = rows_.size();
    rows_.push_back(Row{std::move(coeffs), std::move(payload), pivot});
    reduced_ = false;
    return complete() ? ReceiveResult::Complete : ReceiveResult::Innovative;
  }

  // Solves the system and returns the first `original_length` bytes of the block.
  Bytes recover(std::size_t original_length) {
    if (!complete()) {
      throw NotReady("decoder has rank " + std::to_string(rank()) + " of " +
                     std::to_string(config_.k));
    }
    if (original_length > config_.k * config_.segment_size) {
      throw InvalidInput("original_length exceeds generation capacity");
    }
    back_substitute();
    Bytes out(config_.k * config_.segment_size);
    for (std::size_t j = 0; j < config_.k; ++j) {
      const Bytes& p = rows_[pivot_row_[j]].payload;
      std::memcpy(out.data() + j * config_.segment_size, p.data(), p.size());
    }
    out.resize(original_length);
    return out;
  }

  std::size_t rank() const { return rows_.size(); }
  bool complete() const { return rows_.size() == config_.k; }
  GenerationId generation_id() const { return generation_id_; }
  const GenerationConfig& config() const { return config_; }
  std::span<const Row> rows() const { return rows_; }

 private:
  static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

  // Clears every non-pivot bit, working from the highest pivot down so that the
  // rows used for elimination are already unit vectors.
  void back_substitute() {
    if (reduced_) return;
    for (std::size_t j = config_.k; j-- > 0;) {
      Row& row = rows_[pivot_row_[j]];
      for (std::size_t i = row.coefficients.next_set(j + 1); i < config_.k;
           i = row.coefficients.next_set(i + 1)) {
        const Row& unit = rows_[pivot_row_[i]];
        row.coefficients ^= unit.coefficients;
        xor_bytes(row.payload, unit.payload);
      }
    }
    reduced_ = true;
  }

  GenerationId generation_id_;
  GenerationConfig config_;
  std::vector<Row> rows_;
  std::vector<std::size_t> pivot_row_;
  std::vector<std::size_t> used_;
  bool reduced_ = false;
};

// ---------------------------------------------------------------------------
// Wire format
//
//   generation_id  u32 big-endian
//   k              u16 big-endian
//   segment_size   u16 big-endian
//   coefficients   ceil(k / 8) bytes, MSB-first within each byte
//   payload        segment_size bytes

inline constexpr std::size_t kPacketHeaderSize = 8;

inline std::size_t serialized_size(std::size_t k, std::size_t segment_size) {
  return kPacketHeaderSize + (k + 7) / 8 + segment_size;
}

inline void append_packet(Bytes& out, const CodedPacket& packet) {
  const std::size_t k = packet.coefficients.size();
  const std::size_t seg = packet.payload.size();
  if (k == 0 || k > 0xFFFF) throw InvalidInput("k must fit in 16 bits for serialization");
  if (seg == 0 || seg > 0xFFFF) {
    throw InvalidInput("segment_size must fit in 16 bits for serialization");
  }
  const std::uint32_t id = packet.generation_id;
  out.push_back(static_cast<std::uint8_t>(id >> 24));
  out.push_back(static_cast<std::uint8_t>(id >> 16));
  out.push_back(static_cast<std::uint8_t>(id >> 8));
  out.push_back(static_cast<std::uint8_t>(id));
  out.push_back(static_cast<std::uint8_t>(k >> 8));
  out.push_back(static_cast<std::uint8_t>(k));
  out.push_back(static_cast<std::uint8_t>(seg >> 8));
  out.push_back(static_cast<std::uint8_t>(seg));
  const Bytes bits = packet.coefficients.to_bytes();
  out.insert(out.end(), bits.begin(), bits.end());
  out.insert(out.end(), packet.payload.begin(), packet.payload.end());
}

inline Bytes serialize(const CodedPacket& packet) {
  Bytes out;
  out.reserve(serialized_size(packet.coefficients.size(), packet.payload.size()));
  append_packet(out, packet);
  return out;
}

// Parses one record from the front of `in`; `consumed` receives its length.
inline CodedPacket parse_packet(std::span<const std::uint8_t> in, std::size_t& consumed) {
  if (in.size() < kPacketHeaderSize) throw ProtocolError("truncated packet header");
  const std::uint32_t id = (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) |
                           (std::uint32_t{in[2]} << 8) | std::uint32_t{in[3]};
  const std::size_t k = (std::size_t{in[4]} << 8) | in[5];
  const std::size_t seg = (std::size_t{in[6]} << 8) | in[7];
  if (k == 0 || seg == 0) throw ProtocolError("packet header declares zero k or segment_size");
  const std::size_t total = serialized_size(k, seg);
  if (in.size() < total) throw ProtocolError("truncated packet body");
  const std::size_t coeff_bytes = (k + 7) / 8;
  CodedPacket packet;
  packet.generation_id = id;
  packet.coefficients =
      CoefficientVector::from_bytes(k, in.subspan(kPacketHeaderSize, coeff_bytes));
  auto body = in.subspan(kPacketHeaderSize + coeff_bytes, seg);
  packet.payload.assign(body.begin(), body.end());
  consumed = total;
  return packet;
}

inline std::vector<CodedPacket> parse_packet_stream(std::span<const std::uint8_t> in) {
  std::vector<CodedPacket> packets;
  while (!in.empty()) {
    std::size_t used = 0;
    packets.push_back(parse_packet(in, used));
    in = in.subspan(used);
  }
  return packets;
}

}  // namespace rcnc
