#pragma once

#include <stdexcept>
#include <string>

namespace rcnc {

// Bad argument to a library call (empty data, non-positive sizes, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Packet does not belong to the decoder it was handed to, or a malformed wire record.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// recover() called before the decoder reached full rank.
class NotReady : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inconsistent experiment / simulation configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A reliable-mode run exceeded its configured transmission cap.
class EventCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcnc
