#include "rbt/reference.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace rbt {

void ReferenceModel::insert(Ticket ticket, Key key, Payload payload) {
    live_[key].emplace(ticket, payload);
    ++size_;
}

std::optional<Key> ReferenceModel::min_key() const {
    if (live_.empty()) return std::nullopt;
    return live_.begin()->first;
}

std::vector<Ticket> ReferenceModel::live_tickets() const {
    std::vector<Ticket> out;
    out.reserve(size_);
    for (const auto& [key, dups] : live_) {
        for (const auto& [ticket, payload] : dups) out.push_back(ticket);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::string> ReferenceModel::apply(const IssuedOp& op, const ResultEvent& answer) {
    std::ostringstream why;
    const auto erase_one = [&](Key key, Ticket matched) {
        auto it = live_.find(key);
        it->second.erase(matched);
        if (it->second.empty()) live_.erase(it);
        --size_;
    };
    const auto live_match = [&](Key key, Ticket matched) -> const Payload* {
        auto it = live_.find(key);
        if (it == live_.end()) return nullptr;
        auto d = it->second.find(matched);
        return d == it->second.end() ? nullptr : &d->second;
    };
    const auto has_key = [&](Key key) { return live_.count(key) != 0; };

    switch (op.verb) {
        case TraceOp::Verb::Insert:
            insert(op.ticket, op.key, op.payload);
            return std::nullopt;

        case TraceOp::Verb::Delete:
            if (answer.outcome == Outcome::Deleted && answer.key == op.key) {
                if (live_match(op.key, answer.matched) && answer.matched < op.ticket) {
                    erase_one(op.key, answer.matched);
                    return std::nullopt;
                }
                why << "delete " << op.key << " consumed #" << answer.matched << ", which is not a live earlier duplicate";
            } else if (answer.outcome == Outcome::DeleteNotFound && answer.key == op.key) {
                if (!has_key(op.key)) return std::nullopt;
                why << "delete " << op.key << " reported not-found but the key is present";
            } else {
                why << "delete " << op.key << " answered with " << describe(answer);
            }
            break;

        case TraceOp::Verb::Search:
            if (answer.outcome == Outcome::Found && answer.key == op.key) {
                const Payload* p = live_match(op.key, answer.matched);
                if (p != nullptr && *p == answer.payload && answer.matched < op.ticket) return std::nullopt;
                why << "search " << op.key << " found #" << answer.matched << ", which is not a live earlier duplicate";
            } else if (answer.outcome == Outcome::NotFound && answer.key == op.key) {
                if (!has_key(op.key)) return std::nullopt;
                why << "search " << op.key << " reported not-found but the key is present";
            } else {
                why << "search " << op.key << " answered with " << describe(answer);
            }
            break;

        case TraceOp::Verb::DeleteMin:
            if (answer.outcome == Outcome::Empty) {
                if (live_.empty()) return std::nullopt;
                why << "deletemin reported empty with " << size_ << " elements stored";
            } else if (answer.outcome == Outcome::Min) {
                if (!live_.empty() && answer.key == live_.begin()->first) {
                    const Payload* p = live_match(answer.key, answer.matched);
                    if (p != nullptr && *p == answer.payload) {
                        erase_one(answer.key, answer.matched);
                        return std::nullopt;
                    }
                }
                why << "deletemin returned " << describe(answer) << ", reference minimum is "
                    << (live_.empty() ? std::string("none") : std::to_string(live_.begin()->first));
            } else {
                why << "deletemin answered with " << describe(answer);
            }
            break;

        case TraceOp::Verb::Flush:
            return std::nullopt;
    }
    // Keep the reference state consistent with the expected outcome.
    if (op.verb == TraceOp::Verb::Delete && has_key(op.key)) {
        erase_one(op.key, live_.find(op.key)->second.begin()->first);
    } else if (op.verb == TraceOp::Verb::DeleteMin && !live_.empty()) {
        erase_one(live_.begin()->first, live_.begin()->second.begin()->first);
    }
    return why.str();
}

OracleReport verify_against_reference(std::span<const IssuedOp> ops, std::span<const ResultEvent> answers,
                                      std::span<const Element> stored) {
    OracleReport report;
    std::unordered_map<Ticket, const ResultEvent*> by_ticket;
    for (const ResultEvent& a : answers) {
        if (!by_ticket.emplace(a.ticket, &a).second) {
            report.mismatches.push_back("ticket #" + std::to_string(a.ticket) + " answered more than once");
        }
    }

    std::vector<IssuedOp> ordered(ops.begin(), ops.end());
    std::sort(ordered.begin(), ordered.end(), [](const IssuedOp& a, const IssuedOp& b) { return a.ticket < b.ticket; });

    ReferenceModel reference;
    for (const IssuedOp& op : ordered) {
        if (op.verb == TraceOp::Verb::Flush) continue;
        if (op.verb == TraceOp::Verb::Insert) {
            reference.insert(op.ticket, op.key, op.payload);
            continue;
        }
        ++report.checked;
        auto it = by_ticket.find(op.ticket);
        if (it == by_ticket.end()) {
            report.mismatches.push_back("ticket #" + std::to_string(op.ticket) + " never answered");
            ResultEvent none;
            none.ticket = op.ticket;
            none.outcome = Outcome::Empty;
            (void)reference.apply(op, none);
            continue;
        }
        if (auto mismatch = reference.apply(op, *it->second)) {
            report.mismatches.push_back("ticket #" + std::to_string(op.ticket) + ": " + *mismatch);
        }
    }

    std::vector<Ticket> held;
    held.reserve(stored.size());
    for (const Element& e : stored) held.push_back(e.ticket);
    std::sort(held.begin(), held.end());
    if (held != reference.live_tickets()) {
        report.mismatches.push_back("stored DATA (" + std::to_string(held.size()) +
                                    " elements) differs from reference contents (" +
                                    std::to_string(reference.size()) + " elements)");
    }
    return report;
}

std::vector<Element> stored_data(const BufferTree& tree) {
    std::vector<Element> out;
    for (const auto& located : tree.scan()) {
        if (located.element.is_data()) out.push_back(located.element);
    }
    for (const Element& e : tree.staging()) {
        if (e.is_data()) out.push_back(e);
    }
    const auto cached = tree.min_cache().entries();
    out.insert(out.end(), cached.begin(), cached.end());
    return out;
}

ReplayLog replay(BufferTree& tree, std::span<const TraceOp> trace) {
    ReplayLog log;
    log.ops.reserve(trace.size());
    const auto drain = [&] {
        auto polled = tree.poll_results();
        log.answers.insert(log.answers.end(), polled.begin(), polled.end());
    };
    for (const TraceOp& op : trace) {
        IssuedOp issued{op.verb, 0, op.key, op.payload};
        switch (op.verb) {
            case TraceOp::Verb::Insert: issued.ticket = tree.insert(op.key, op.payload); break;
            case TraceOp::Verb::Delete: issued.ticket = tree.remove(op.key); break;
            case TraceOp::Verb::Search: issued.ticket = tree.search(op.key); break;
            case TraceOp::Verb::DeleteMin: {
                const ResultEvent ev = tree.delete_min();
                issued.ticket = ev.ticket;
                log.answers.push_back(ev);
                break;
            }
            case TraceOp::Verb::Flush: tree.flush(); break;
        }
        log.ops.push_back(issued);
    }
    drain();
    return log;
}

}  // namespace rbt
