#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rcnc/error.hpp"
#include "rcnc/harness/config.hpp"
#include "rcnc/harness/sweep.hpp"

namespace rcnc::harness {

inline constexpr const char* kCsvHeader =
    "mode,n_clients,p,k,run_index,seed,airtime_units,data_tx,ack_count,retransmissions,"
    "delivery_ratio,completed";

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string format_row(const SweepRow& r) {
  std::string line;
  line += r.mode;
  line += ',' + std::to_string(r.n_clients);
  line += ',' + fixed6(r.p);
  line += ',' + std::to_string(r.k);
  line += ',' + std::to_string(r.run_index);
  line += ',' + std::to_string(r.seed);
  line += ',' + fixed6(r.airtime_units);
  line += ',' + std::to_string(r.data_tx);
  line += ',' + std::to_string(r.ack_count);
  line += ',' + std::to_string(r.retransmissions);
  line += ',' + fixed6(r.delivery_ratio);
  line += r.completed ? ",true" : ",false";
  return line;
}

inline void emit_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

inline void emit_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  emit_csv(rows, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline SweepRow parse_row(const std::string& line) {
  const auto fields = detail::split_list(line);
  if (fields.size() != 12) {
    throw InvalidInput("csv row has " + std::to_string(fields.size()) + " fields, expected 12");
  }
  using detail::parse_number;
  SweepRow r;
  r.mode = std::string(fields[0]);
  r.n_clients = parse_number<std::size_t>("n_clients", fields[1]);
  r.p = parse_number<double>("p", fields[2]);
  r.k = parse_number<std::size_t>("k", fields[3]);
  r.run_index = parse_number<std::size_t>("run_index", fields[4]);
  r.seed = parse_number<std::uint64_t>("seed", fields[5]);
  r.airtime_units = parse_number<double>("airtime_units", fields[6]);
  r.data_tx = parse_number<std::uint64_t>("data_tx", fields[7]);
  r.ack_count = parse_number<std::uint64_t>("ack_count", fields[8]);
  r.retransmissions = parse_number<std::uint64_t>("retransmissions", fields[9]);
  r.delivery_ratio = parse_number<double>("delivery_ratio", fields[10]);
  if (fields[11] == "true") {
    r.completed = true;
  } else if (fields[11] == "false") {
    r.completed = false;
  } else {
    throw InvalidInput("completed field must be true or false");
  }
  return r;
}

inline std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw InvalidInput("missing csv header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

}  // namespace rcnc::harness
