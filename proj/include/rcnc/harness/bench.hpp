#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "rcnc/codec.hpp"
#include "rcnc/error.hpp"
#include "rcnc/harness/csv.hpp"
#include "rcnc/random.hpp"

namespace rcnc::harness {

struct BenchRow {
  std::size_t k = 0;
  std::size_t segment_size = 0;
  std::size_t trials = 0;
  double mean_packets_to_complete = 0.0;
  // MB/s of source data, over trials.
  double encode_mbps_mean = 0.0;
  double encode_mbps_p50 = 0.0;
  double encode_mbps_p95 = 0.0;
  double decode_mbps_mean = 0.0;
  double decode_mbps_p50 = 0.0;
  double decode_mbps_p95 = 0.0;
};

namespace detail {

// Nearest-rank percentile of an unsorted sample.
inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace detail

// Encodes and decodes one generation per trial, timing the encoder
// (next_coded_packet) and the decoder (receive + recover) separately.
inline std::vector<BenchRow> codec_bench(std::span<const std::size_t> k_list,
                                         std::size_t segment_size, std::size_t trials,
                                         std::uint64_t seed) {
  if (k_list.empty() || segment_size == 0 || trials == 0) {
    throw InvalidInput("codec bench needs a k list, positive segment size and trials");
  }
  using clock = std::chrono::steady_clock;
  Rng rng(seed);
  std::vector<BenchRow> rows;
  for (std::size_t k : k_list) {
    if (k == 0) throw InvalidInput("k must be positive");
    BenchRow row{k, segment_size, trials};
    std::vector<double> enc;
    std::vector<double> dec;
    std::uint64_t packets_total = 0;
    Bytes data(k * segment_size);
    for (std::size_t t = 0; t < trials; ++t) {
      rng.fill(data);
      const Generation gen = make_generation(data, k, static_cast<GenerationId>(t));
      Decoder decoder(gen);
      clock::duration enc_time{};
      clock::duration dec_time{};
      std::uint64_t packets = 0;
      bool done = false;
      while (!done) {
        auto t0 = clock::now();
        const CodedPacket pkt = next_coded_packet(gen, rng);
        auto t1 = clock::now();
        done = decoder.receive(pkt) == ReceiveResult::Complete;
        auto t2 = clock::now();
        enc_time += t1 - t0;
        dec_time += t2 - t1;
        ++packets;
      }
      auto t3 = clock::now();
      const Bytes out = decoder.recover(gen.original_length());
      dec_time += clock::now() - t3;
      if (out != data) throw ProtocolError("codec bench decoded a block that differs from the source");

      packets_total += packets;
      const double mb = static_cast<double>(data.size()) / 1e6;
      auto rate = [mb](clock::duration d) {
        const double s = std::chrono::duration<double>(d).count();
        return s > 0 ? mb / s : 0.0;
      };
      enc.push_back(rate(enc_time));
      dec.push_back(rate(dec_time));
    }
    row.mean_packets_to_complete = static_cast<double>(packets_total) / static_cast<double>(trials);
    row.encode_mbps_mean = detail::mean(enc);
    row.encode_mbps_p50 = detail::percentile(enc, 0.50);
    row.encode_mbps_p95 = detail::percentile(enc, 0.95);
    row.decode_mbps_mean = detail::mean(dec);
    row.decode_mbps_p50 = detail::percentile(dec, 0.50);
    row.decode_mbps_p95 = detail::percentile(dec, 0.95);
    rows.push_back(row);
  }
  return rows;
}

inline void emit_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << "k,segment_size,trials,mean_packets_to_complete,encode_mbps_mean,encode_mbps_p50,"
         "encode_mbps_p95,decode_mbps_mean,decode_mbps_p50,decode_mbps_p95\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.segment_size << ',' << r.trials << ','
        << fixed6(r.mean_packets_to_complete) << ',' << fixed6(r.encode_mbps_mean) << ','
        << fixed6(r.encode_mbps_p50) << ',' << fixed6(r.encode_mbps_p95) << ','
        << fixed6(r.decode_mbps_mean) << ',' << fixed6(r.decode_mbps_p50) << ','
        << fixed6(r.decode_mbps_p95) << '\n';
  }
}

}  // namespace rcnc::harness
