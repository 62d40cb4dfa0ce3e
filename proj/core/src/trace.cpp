#include "rbt/trace.hpp"

#include <charconv>
#include <sstream>
#include <string_view>

namespace rbt {

namespace {

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw TraceParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

}  // namespace

std::vector<TraceOp> parse_trace(std::istream& in) {
    std::vector<TraceOp> ops;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        const auto tokens = split(text);
        if (tokens.empty() || tokens[0].front() == '#') continue;

        TraceOp op;
        op.line = line;
        const std::string_view verb = tokens[0];
        std::size_t arity = 0;
        std::size_t max_arity = 0;
        if (verb == "i") {
            op.verb = TraceOp::Verb::Insert;
            arity = 1;
            max_arity = 2;
        } else if (verb == "d") {
            op.verb = TraceOp::Verb::Delete;
            arity = max_arity = 1;
        } else if (verb == "q") {
            op.verb = TraceOp::Verb::Search;
            arity = max_arity = 1;
        } else if (verb == "m") {
            op.verb = TraceOp::Verb::DeleteMin;
        } else if (verb == "f") {
            op.verb = TraceOp::Verb::Flush;
        } else {
            throw TraceParseError(line, "unknown verb '" + std::string(verb) + "'");
        }
        const std::size_t args = tokens.size() - 1;
        if (args < arity || args > max_arity) {
            throw TraceParseError(line, "wrong number of arguments for '" + std::string(verb) + "'");
        }
        if (args >= 1) op.key = parse_number<Key>(tokens[1], line, "key");
        if (args >= 2) op.payload = parse_number<Payload>(tokens[2], line, "payload");
        ops.push_back(op);
    }
    return ops;
}

std::string format_trace(const std::vector<TraceOp>& ops) {
    std::ostringstream os;
    for (const TraceOp& op : ops) {
        os << static_cast<char>(op.verb);
        switch (op.verb) {
            case TraceOp::Verb::Insert: os << ' ' << op.key << ' ' << op.payload; break;
            case TraceOp::Verb::Delete:
            case TraceOp::Verb::Search: os << ' ' << op.key; break;
            default: break;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace rbt
