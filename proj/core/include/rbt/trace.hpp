#pragma once

#include <cstddef>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbt/element.hpp"

namespace rbt {

/// One line of a trace file:
///   i <key> [payload]   insert
///   d <key>             delete
///   q <key>             search
///   m                   deletemin
///   f                   flush
/// Blank lines and lines starting with '#' are ignored.
struct TraceOp {
    enum class Verb : char { Insert = 'i', Delete = 'd', Search = 'q', DeleteMin = 'm', Flush = 'f' };

    Verb verb = Verb::Insert;
    Key key = 0;
    Payload payload = 0;
    std::size_t line = 0;

    friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[nodiscard]] std::vector<TraceOp> parse_trace(std::istream& in);
[[nodiscard]] std::string format_trace(const std::vector<TraceOp>& ops);

}  // namespace rbt
