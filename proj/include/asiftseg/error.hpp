#pragma once

#include <stdexcept>
#include <string>

namespace asiftseg {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable/unwritable files, malformed file formats.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Inputs that violate an operation's preconditions (image too small,
// singular warp map, mismatched mask dimensions, ...).
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

// Valid inputs from which nothing useful can be produced: training images
// with no keypoints, a detection with no object seed.
class NoResult : public Error {
public:
    explicit NoResult(const std::string& msg) : Error(msg) {}
};

}  // namespace asiftseg
