#pragma once

#include <stdexcept>
#include <string>

namespace kinlearn {

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define KINLEARN_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                      \
    public:                                                          \
        explicit Name(const std::string& what) : Error(what) {}      \
    }

KINLEARN_DEFINE_ERROR(DegenerateGeometry);
KINLEARN_DEFINE_ERROR(EmptyInput);
KINLEARN_DEFINE_ERROR(InvalidSpec);
KINLEARN_DEFINE_ERROR(InsufficientCorrespondences);
KINLEARN_DEFINE_ERROR(DisconnectedParts);
KINLEARN_DEFINE_ERROR(MissingConfiguration);
KINLEARN_DEFINE_ERROR(UnknownObject);
KINLEARN_DEFINE_ERROR(DuplicateObject);
KINLEARN_DEFINE_ERROR(MissingGroundTruth);

#undef KINLEARN_DEFINE_ERROR

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class SchemaVersionMismatch : public Error {
public:
    SchemaVersionMismatch(int found, int expected)
        : Error("schema version mismatch: file has version " + std::to_string(found) +
                ", this build reads version " + std::to_string(expected)),
          found_(found), expected_(expected) {}
    int found() const { return found_; }
    int expected() const { return expected_; }

private:
    int found_;
    int expected_;
};

}  // namespace kinlearn
