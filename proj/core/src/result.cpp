#include "rbt/result.hpp"

#include <ostream>
#include <sstream>

namespace rbt {

std::string_view to_string(ElementKind kind) noexcept {
    switch (kind) {
        case ElementKind::Data: return "data";
        case ElementKind::Delete: return "delete";
        case ElementKind::Search: return "search";
    }
    return "?";
}

std::string_view to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::Found: return "found";
        case Outcome::NotFound: return "not-found";
        case Outcome::Deleted: return "deleted";
        case Outcome::DeleteNotFound: return "delete-not-found";
        case Outcome::Min: return "min";
        case Outcome::Empty: return "empty";
    }
    return "?";
}

std::string describe(const ResultEvent& event) {
    std::ostringstream os;
    os << event;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const ResultEvent& event) {
    os << '#' << event.ticket << ' ' << to_string(event.outcome);
    if (event.outcome != Outcome::Empty) os << ' ' << event.key;
    if (event.outcome == Outcome::Found || event.outcome == Outcome::Min) os << " payload=" << event.payload;
    return os;
}

}  // namespace rbt
