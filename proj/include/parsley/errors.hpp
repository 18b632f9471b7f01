#pragma once

#include <stdexcept>
#include <string>

namespace parsley {

// Invalid or inconsistent configuration (size limits, timers, grid cells).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Lookup of a group id that is not (or no longer) part of the overlay.
class UnknownGroup : public std::runtime_error {
 public:
  explicit UnknownGroup(const std::string& what) : std::runtime_error(what) {}
};

class UnknownPeer : public std::runtime_error {
 public:
  explicit UnknownPeer(const std::string& what) : std::runtime_error(what) {}
};

class DuplicatePeer : public std::runtime_error {
 public:
  explicit DuplicatePeer(const std::string& what) : std::runtime_error(what) {}
};

// Scheduling an event before the current simulated time.
class PastDeadline : public std::runtime_error {
 public:
  explicit PastDeadline(const std::string& what) : std::runtime_error(what) {}
};

class NotEnoughPeers : public std::runtime_error {
 public:
  explicit NotEnoughPeers(const std::string& what) : std::runtime_error(what) {}
};

// Bootstrap population below the minimum group size.
class InsufficientPeers : public std::runtime_error {
 public:
  explicit InsufficientPeers(const std::string& what)
      : std::runtime_error(what) {}
};

class TooSmallToSplit : public std::runtime_error {
 public:
  explicit TooSmallToSplit(const std::string& what) : std::runtime_error(what) {}
};

class MetricsError : public std::runtime_error {
 public:
  explicit MetricsError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace parsley
