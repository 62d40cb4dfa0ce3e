#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

#include "rbt/buffer_tree.hpp"
#include "rbt/self_adjust.hpp"

namespace rbt {

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::HeapOrder: return "heap";
        case ViolationKind::KeyOrder: return "keys";
        case ViolationKind::Occupancy: return "occupancy";
        case ViolationKind::BufferOrder: return "buffer-order";
        case ViolationKind::PendingOp: return "pending-op";
        case ViolationKind::Structure: return "structure";
    }
    return "?";
}

std::string describe(const Violation& v) {
    std::ostringstream os;
    os << "kind=" << to_string(v.kind) << " path=/";
    for (std::size_t i = 0; i < v.path.size(); ++i) os << (i ? "/" : "") << v.path[i];
    os << " keys=[";
    for (std::size_t i = 0; i < v.keys.size(); ++i) os << (i ? "," : "") << v.keys[i];
    os << "]";
    if (!v.detail.empty()) os << " " << v.detail;
    return os.str();
}

namespace {

struct Frame {
    NodeId id;
    std::vector<std::size_t> path;
    std::optional<Key> lo;  // inclusive
    std::optional<Key> hi;  // exclusive
};

// Per-node summary used for the heap check.
struct Summary {
    std::optional<Element> min_data;      // lowest-priority DATA in the buffer
    std::optional<Element> subtree_max;   // highest-priority DATA in the subtree
};

}  // namespace

std::vector<Violation> BufferTree::check_invariants() const {
    std::vector<Violation> out;
    const auto aged = [&](Element e) {
        if (config_.selfadjust_mode == SelfAdjustMode::Counter && e.is_data() && e.epoch < epoch_) {
            e.priority = aged_counter(e.priority, epoch_ - e.epoch);
        }
        return e;
    };

    // Pre-order walk collecting frames; summaries are combined bottom-up.
    std::vector<Frame> order;
    std::vector<Frame> stack{{root_, {}, std::nullopt, std::nullopt}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const Node& n = node(f.id);
        if (!n.is_leaf()) {
            if (n.children.size() != n.separators.size() + 1) {
                out.push_back({ViolationKind::Structure, f.path, {}, "children != separators + 1"});
            } else {
                for (std::size_t i = n.children.size(); i-- > 0;) {
                    Frame c{n.children[i], f.path, f.lo, f.hi};
                    c.path.push_back(i);
                    if (i > 0) c.lo = n.separators[i - 1];
                    if (i < n.separators.size()) c.hi = n.separators[i];
                    stack.push_back(std::move(c));
                }
            }
        } else if (!n.separators.empty()) {
            out.push_back({ViolationKind::Structure, f.path, {}, "leaf with separators"});
        }
        if (!std::is_sorted(n.separators.begin(), n.separators.end()) ||
            std::adjacent_find(n.separators.begin(), n.separators.end()) != n.separators.end()) {
            out.push_back({ViolationKind::Structure, f.path, n.separators, "separators not strictly increasing"});
        }
        order.push_back(std::move(f));
    }

    std::vector<Summary> summary(nodes_.size());
    for (std::size_t idx = order.size(); idx-- > 0;) {
        const Frame& f = order[idx];
        const Node& n = node(f.id);
        Summary& s = summary[f.id.value];
        std::vector<Key> out_of_range;
        std::vector<Key> pending;
        bool unsorted = false;

        for (const Run& r : n.runs) {
            std::optional<Element> prev;
            for (BlockId b : r.blocks) {
                for (const Element& raw : store_.inspect(b).elements) {
                    const Element e = aged(raw);
                    if (prev && !higher_priority(*prev, e)) unsorted = true;
                    prev = e;
                    if ((f.lo && e.key < *f.lo) || (f.hi && e.key >= *f.hi)) out_of_range.push_back(e.key);
                    if (e.is_op()) {
                        pending.push_back(e.key);
                        continue;
                    }
                    if (!s.min_data || higher_priority(*s.min_data, e)) s.min_data = e;
                    if (!s.subtree_max || higher_priority(e, *s.subtree_max)) s.subtree_max = e;
                }
            }
        }
        if (unsorted) out.push_back({ViolationKind::BufferOrder, f.path, {}, "run not in descending priority order"});
        if (!out_of_range.empty()) {
            out.push_back({ViolationKind::KeyOrder, f.path, out_of_range, "key outside the node's separator gap"});
        }
        if (!pending.empty()) out.push_back({ViolationKind::PendingOp, f.path, pending, "operation element in buffer"});

        const std::size_t blocks = n.buffer_blocks();
        if (f.id != root_ && !n.is_leaf() && (blocks < config_.quarter() || blocks > config_.fanout)) {
            out.push_back({ViolationKind::Occupancy, f.path, {},
                           "internal node holds " + std::to_string(blocks) + " blocks"});
        }

        for (std::size_t i = 0; i < n.children.size(); ++i) {
            const Summary& cs = summary[n.children[i].value];
            if (!cs.subtree_max) continue;
            if (s.min_data && !higher_priority(*s.min_data, *cs.subtree_max)) {
                std::vector<std::size_t> child_path = f.path;
                child_path.push_back(i);
                out.push_back({ViolationKind::HeapOrder, child_path, {s.min_data->key, cs.subtree_max->key},
                               "child subtree holds priority " + std::to_string(cs.subtree_max->priority) +
                                   " above parent minimum " + std::to_string(s.min_data->priority)});
            }
            if (!s.subtree_max || higher_priority(*cs.subtree_max, *s.subtree_max)) s.subtree_max = cs.subtree_max;
        }
    }
    return out;
}

bool BufferTree::inject_fault(FaultKind kind) {
    // Finds a non-root node holding DATA whose parent also holds DATA
    // (heap) or that has a bounding separator (keys). Shallowest first.
    std::vector<std::pair<NodeId, NodeId>> frontier;  // (parent, child)
    for (NodeId c : node(root_).children) frontier.emplace_back(root_, c);
    for (std::size_t at = 0; at < frontier.size(); ++at) {
        const auto [pid, cid] = frontier[at];
        const Node& parent = node(pid);
        const Node& child = node(cid);
        for (NodeId g : child.children) frontier.emplace_back(cid, g);
        if (child.runs.empty() || child.elements == child.ops) continue;

        const BlockId target = child.runs.front().blocks.front();
        Block blk = store_.inspect(target);
        auto it = std::find_if(blk.elements.begin(), blk.elements.end(), [](const Element& e) { return e.is_data(); });
        if (it == blk.elements.end()) continue;

        if (kind == FaultKind::Heap) {
            if (parent.elements == parent.ops) continue;
            Priority parent_max = 0;
            for (const Run& r : parent.runs) {
                for (BlockId b : r.blocks) {
                    for (const Element& e : store_.inspect(b).elements) parent_max = std::max(parent_max, e.priority);
                }
            }
            if (parent_max == std::numeric_limits<Priority>::max()) continue;
            it->priority = parent_max + 1;
            // Keep the run sorted so only the heap check fires.
            std::iter_swap(blk.elements.begin(), it);
        } else {
            const auto pos = static_cast<std::size_t>(
                std::find(parent.children.begin(), parent.children.end(), cid) - parent.children.begin());
            if (pos < parent.separators.size()) {
                it->key = parent.separators[pos];
            } else if (pos > 0) {
                it->key = parent.separators[pos - 1] - 1;
            } else {
                continue;
            }
        }
        store_.write(target, std::move(blk));
        return true;
    }
    return false;
}

}  // namespace rbt
