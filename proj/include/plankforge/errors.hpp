#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plankforge {

/// Base class for every error raised by the toolkit. Input problems derive
/// from this; anything else escaping a call is an internal fault.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ZeroVolumeError : public Error {
 public:
  explicit ZeroVolumeError(int plank)
      : Error("zero volume: cuboid " + std::to_string(plank)), plank_(plank) {}
  int plank() const { return plank_; }

 private:
  int plank_;
};

class EditOnAttachmentError : public Error {
 public:
  EditOnAttachmentError(int plank, int dof)
      : Error("cannot edit attached coordinate " + std::to_string(dof) + " of cuboid " +
              std::to_string(plank)) {}
};

class CyclicAttachmentError : public Error {
 public:
  explicit CyclicAttachmentError(std::vector<int> cycle)
      : Error(describe(cycle)), cycle_(std::move(cycle)) {}
  /// Input plank indices forming the cycle, in dependency order.
  const std::vector<int>& cycle() const { return cycle_; }

 private:
  static std::string describe(const std::vector<int>& c) {
    std::string s = "cyclic attachment:";
    for (int i : c) s += " " + std::to_string(i);
    return s;
  }
  std::vector<int> cycle_;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class MalformedPointerError : public Error {
 public:
  MalformedPointerError(int position, int target)
      : Error("malformed pointer at position " + std::to_string(position) + " -> " +
              std::to_string(target)) {}
};

class RetryExhaustedError : public Error {
 public:
  using Error::Error;
};

}  // namespace plankforge
