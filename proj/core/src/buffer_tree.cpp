#include "rbt/buffer_tree.hpp"

#include <algorithm>
#include <cassert>
#include <exception>
#include <stdexcept>

#include "rbt/primitives.hpp"

namespace rbt {

void TreeConfig::validate() const {
    if (block_capacity < 2) throw std::invalid_argument("block capacity B must be at least 2");
    if (fanout < 4) throw std::invalid_argument("fan-out f must be at least 4");
    if (selfadjust_mode == SelfAdjustMode::Counter && (counter_bits < 2 || counter_bits > 63)) {
        throw std::invalid_argument("counter width must be between 2 and 63 bits");
    }
}

// Measures one primitive invocation. I/O performed while a nested scope is
// open is charged to that scope and subtracted from this one's own cost.
struct BufferTree::PrimitiveScope {
    BufferTree& tree;
    PrimitiveRecord record;
    std::uint64_t start;
    bool finished = false;

    PrimitiveScope(BufferTree& t, PrimitiveKind kind, EmptyMode mode, NodeId id)
        : tree(t), start(t.store_.stats().total()) {
        const Node& n = t.node(id);
        record.kind = kind;
        record.mode = mode;
        record.node = id;
        record.depth = n.depth;
        record.was_leaf = n.is_leaf();
        record.blocks_before = n.buffer_blocks();
        t.nested_io_.push_back(0);
    }

    // Marks the end of this invocation's own buffer work.
    void done() {
        if (finished) return;
        finished = true;
        record.blocks_after = tree.node(record.node).buffer_blocks();
    }

    ~PrimitiveScope() {
        const std::uint64_t total = tree.store_.stats().total() - start;
        const std::uint64_t nested = tree.nested_io_.back();
        tree.nested_io_.pop_back();
        if (!tree.nested_io_.empty()) tree.nested_io_.back() += total;
        if (std::uncaught_exceptions() > 0) return;
        if (!finished && tree.nodes_[record.node.value].live) done();
        record.total_io = total;
        record.own_io = total - nested;
        if (tree.observer_) tree.observer_(record);
    }
};

BufferTree::BufferTree(TreeConfig config)
    : config_((config.validate(), config)),
      store_(StoreConfig{config.block_capacity, true}),
      cache_(config.cache_capacity()),
      rng_(config.rng_seed) {
    root_ = new_node(0);
}

NodeId BufferTree::new_node(std::uint32_t depth) {
    NodeId id;
    if (!free_nodes_.empty()) {
        id.value = free_nodes_.back();
        free_nodes_.pop_back();
    } else {
        id.value = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    Node& n = nodes_[id.value];
    n = Node{};
    n.depth = depth;
    n.live = true;
    return id;
}

void BufferTree::release_node(NodeId id) {
    Node& n = mut(id);
    assert(n.elements == 0 && n.children.empty());
    for (const Run& r : n.runs) {
        for (BlockId b : r.blocks) store_.free(b);
    }
    n = Node{};
    free_nodes_.push_back(id.value);
}

std::size_t BufferTree::blocks_for(std::size_t elements) const noexcept {
    return (elements + config_.block_capacity - 1) / config_.block_capacity;
}

Priority BufferTree::fresh_priority() {
    const Priority p = rng_();
    return p == 0 ? 1 : p;  // zero is reserved for operation elements
}

Element BufferTree::make_element(ElementKind kind, Key key, Priority priority, Payload payload) {
    return Element{key, priority, kind, payload, next_ticket(), epoch_};
}

// --- dictionary operations ---------------------------------------------------

Ticket BufferTree::insert(Key key, Payload payload) {
    const Priority priority = config_.selfadjust_mode == SelfAdjustMode::Counter ? 1 : fresh_priority();
    const Element e = make_element(ElementKind::Data, key, priority, payload);
    if (cache_.admits(key)) {
        if (auto evicted = cache_.insert(e)) stage(*evicted);
        return e.ticket;
    }
    stage(e);
    return e.ticket;
}

Ticket BufferTree::remove(Key key) {
    const Ticket t = next_ticket();
    if (auto hit = cache_.remove_one(key)) {
        results_.push_back({t, Outcome::Deleted, key, hit->payload, hit->ticket, 0});
        return t;
    }
    stage(Element{key, 0, ElementKind::Delete, 0, t, epoch_});
    return t;
}

Ticket BufferTree::search(Key key) {
    const Ticket t = next_ticket();
    if (const Element* hit = cache_.find(key)) {
        results_.push_back({t, Outcome::Found, key, hit->payload, hit->ticket, 0});
        return t;
    }
    stage(Element{key, 0, ElementKind::Search, 0, t, epoch_});
    return t;
}

void BufferTree::stage(const Element& e) {
    staging_.push_back(e);
    if (staging_.size() >= config_.block_capacity) push_staging();
}

void BufferTree::push_staging() {
    if (staging_.empty()) return;
    std::sort(staging_.begin(), staging_.end(), HigherPriority{});
    write_run(root_, staging_);
    staging_.clear();
    if (node(root_).buffer_blocks() > config_.fanout) empty_buffer(root_, EmptyMode::KeepHalf);
}

std::vector<ResultEvent> BufferTree::poll_results() {
    std::vector<ResultEvent> out;
    out.swap(results_);
    return out;
}

void BufferTree::emit(std::vector<ResultEvent>& results) {
    results_.insert(results_.end(), results.begin(), results.end());
}

void BufferTree::flush() {
    push_staging();

    // Top-down: empty every internal buffer completely so that every
    // pending operation meets every DATA element on its search path.
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const Node& n = node(id);
        if (n.is_leaf()) {
            const bool compact = n.runs.empty() || n.runs.front().blocks.size() == blocks_for(n.elements);
            if (needs_settle(id) || !compact) empty_buffer(id, EmptyMode::Full);
            continue;
        }
        empty_buffer(id, EmptyMode::Full);
        for (NodeId c : node(id).children) stack.push_back(c);
    }

    // Bottom-up: refill internal buffers from their (already rebuilt)
    // children, restoring heap order and occupancy.
    rebuild(root_);
}

void BufferTree::rebuild(NodeId id) {
    if (node(id).is_leaf()) return;
    for (NodeId c : std::vector<NodeId>(node(id).children)) rebuild(c);
    fill_buffer(id);
}

// --- priority queue ----------------------------------------------------------

ResultEvent BufferTree::delete_min() {
    const Ticket t = next_ticket();
    if (cache_.empty()) refill_cache();
    if (cache_.empty()) return ResultEvent{t, Outcome::Empty, 0, 0, 0, 0};
    const Element e = cache_.pop_min();
    return ResultEvent{t, Outcome::Min, e.key, e.payload, e.ticket, 0};
}

void BufferTree::refill_cache() {
    push_staging();
    while (cache_.empty() && tree_data_ > 0) {
        std::vector<NodeId> path{root_};
        NodeId id = root_;
        while (!node(id).is_leaf()) {
            empty_buffer(id, EmptyMode::Full);
            if (node(id).is_leaf()) break;
            id = node(id).children.front();
            path.push_back(id);
        }
        extract_leftmost(path);
    }
}

bool BufferTree::extract_leftmost(const std::vector<NodeId>& path) {
    const NodeId leaf = path.back();
    std::vector<Element> elems = load_buffer(leaf);
    resolve(leaf, elems);

    std::sort(elems.begin(), elems.end(), KeyThenTicket{});
    const std::size_t take = std::min(cache_.capacity(), elems.size());
    cache_.assign(std::vector<Element>(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(take)));
    std::vector<Element> rest(elems.begin() + static_cast<std::ptrdiff_t>(take), elems.end());
    std::sort(rest.begin(), rest.end(), HigherPriority{});
    write_run(leaf, rest);

    // Drop the emptied leftmost leaf and any ancestors left empty and
    // childless by its removal.
    for (std::size_t i = path.size() - 1; i > 0; --i) {
        const NodeId id = path[i];
        const Node& n = node(id);
        if (!n.is_leaf() || n.elements != 0) break;
        Node& parent = mut(path[i - 1]);
        assert(parent.children.front() == id);
        parent.children.erase(parent.children.begin());
        if (!parent.separators.empty()) parent.separators.erase(parent.separators.begin());
        release_node(id);
    }
    return take > 0;
}

// --- buffer I/O ---------------------------------------------------------------

std::vector<Element> BufferTree::load_buffer(NodeId id) {
    Node& n = mut(id);
    std::vector<Element> out;
    out.reserve(n.elements);
    std::vector<Run> runs;
    runs.swap(n.runs);
    for (const Run& r : runs) {
        for (BlockId b : r.blocks) {
            Block blk = store_.read(b);
            store_.free(b);
            out.insert(out.end(), blk.elements.begin(), blk.elements.end());
        }
    }
    tree_data_ -= n.elements - n.ops;
    tree_ops_ -= n.ops;
    n.elements = 0;
    n.ops = 0;
    normalize(out);
    return out;
}

void BufferTree::write_run(NodeId id, std::span<const Element> elements) {
    if (elements.empty()) return;
    Run run;
    run.size = elements.size();
    run.epoch = epoch_;
    std::size_t ops = 0;
    const std::size_t b = config_.block_capacity;
    for (std::size_t i = 0; i < elements.size(); i += b) {
        const std::size_t end = std::min(elements.size(), i + b);
        Block blk;
        blk.elements.assign(elements.begin() + static_cast<std::ptrdiff_t>(i),
                            elements.begin() + static_cast<std::ptrdiff_t>(end));
        for (const Element& e : blk.elements) {
            ops += e.is_op() ? 1 : 0;
            run.epoch = std::min(run.epoch, e.epoch);
        }
        const BlockId bid = store_.alloc();
        store_.write(bid, std::move(blk));
        run.blocks.push_back(bid);
    }
    Node& n = mut(id);
    n.runs.push_back(std::move(run));
    n.elements += elements.size();
    n.ops += ops;
    tree_data_ += elements.size() - ops;
    tree_ops_ += ops;
}

void BufferTree::normalize(std::vector<Element>& elements) const {
    if (config_.selfadjust_mode != SelfAdjustMode::Counter) return;
    for (Element& e : elements) {
        if (e.epoch < epoch_) {
            if (e.is_data()) e.priority = aged_counter(e.priority, epoch_ - e.epoch);
            e.epoch = epoch_;
        }
    }
}

void BufferTree::maybe_reset_counters(NodeId id, std::vector<Element>& elements) {
    if (config_.selfadjust_mode != SelfAdjustMode::Counter || id != root_) return;
    const Priority bound = counter_reset_bound(config_.counter_bits);
    const bool saturated =
        std::any_of(elements.begin(), elements.end(), [&](const Element& e) { return e.is_data() && e.priority >= bound; });
    if (!saturated) return;
    ++epoch_;
    normalize(elements);
}

void BufferTree::resolve(NodeId id, std::vector<Element>& elements) {
    const std::uint32_t depth = node(id).depth;
    MatchHook hook;
    if (config_.selfadjust_mode == SelfAdjustMode::Rerandomize) {
        hook = [this](Element& e) { e.priority = rerandomized_priority(e.priority, rng_()); };
    } else if (config_.selfadjust_mode == SelfAdjustMode::Counter) {
        const Priority bound = counter_reset_bound(config_.counter_bits);
        hook = [bound](Element& e) { e.priority = incremented_counter(e.priority, bound); };
    }
    AnnihilationResult res = annihilate(std::move(elements), depth, hook);
    elements = std::move(res.survivors);
    if (node(id).is_leaf()) resolve_as_missing(elements, depth, res.results);
    emit(res.results);
    maybe_reset_counters(id, elements);
    std::sort(elements.begin(), elements.end(), HigherPriority{});
}

// --- EMPTYBUFFER ----------------------------------------------------------------

void BufferTree::push_to_children(NodeId id, std::span<const Element> elements) {
    if (elements.empty()) return;
    const Node& n = node(id);
    const std::vector<Key> separators = n.separators;
    const std::vector<NodeId> children = n.children;
    std::vector<std::vector<Element>> buckets(children.size());
    for (const Element& e : elements) buckets[route(separators, e.key)].push_back(e);
    for (std::size_t i = 0; i < children.size(); ++i) write_run(children[i], buckets[i]);
}

bool BufferTree::split_leaf(NodeId id, std::span<const Element> overflow) {
    if (overflow.empty()) return false;
    std::vector<Key> separators = choose_separators(overflow, config_.fanout);
    // Splitting is pointless unless the overflow lands in at least two
    // children; otherwise duplicates would grow an unbounded chain.
    const std::size_t first = route(separators, overflow.front().key);
    const bool spreads = std::any_of(overflow.begin(), overflow.end(),
                                     [&](const Element& e) { return route(separators, e.key) != first; });
    if (!spreads) return false;
    attach_children(id, std::move(separators));
    push_to_children(id, overflow);
    return true;
}

std::vector<NodeId> BufferTree::attach_children(NodeId leaf, std::vector<Key> separators) {
    if (!node(leaf).is_leaf()) throw std::logic_error("attach_children: node already has children");
    if (!std::is_sorted(separators.begin(), separators.end()) ||
        std::adjacent_find(separators.begin(), separators.end()) != separators.end()) {
        throw std::invalid_argument("attach_children: separators must be strictly increasing");
    }
    if (separators.size() + 1 > config_.fanout) throw std::invalid_argument("attach_children: too many separators");
    const std::uint32_t depth = node(leaf).depth + 1;
    std::vector<NodeId> children;
    for (std::size_t i = 0; i <= separators.size(); ++i) children.push_back(new_node(depth));
    Node& n = mut(leaf);
    n.separators = std::move(separators);
    n.children = children;
    return children;
}

void BufferTree::append_to_buffer(NodeId id, std::vector<Element> elements) {
    std::sort(elements.begin(), elements.end(), HigherPriority{});
    write_run(id, elements);
}

void BufferTree::empty_overflowing_children(NodeId id) {
    const std::vector<NodeId> children = node(id).children;
    for (NodeId c : children) {
        if (node(c).live && node(c).buffer_blocks() > config_.fanout) empty_buffer(c, EmptyMode::KeepHalf);
    }
}

void BufferTree::empty_buffer(NodeId id, EmptyMode mode) {
    PrimitiveScope scope(*this, PrimitiveKind::EmptyBuffer, mode, id);

    std::vector<Element> elems = load_buffer(id);
    resolve(id, elems);

    const bool leaf = node(id).is_leaf();
    const std::size_t remaining = blocks_for(elems.size());

    if (mode == EmptyMode::Full && leaf) {
        // Nothing below a leaf: operations were answered, DATA stays.
        write_run(id, elems);
        scope.done();
        return;
    }

    if (mode == EmptyMode::Full || remaining > config_.three_quarters()) {
        const std::size_t keep =
            mode == EmptyMode::Full ? 0 : std::min(elems.size(), config_.half() * config_.block_capacity);
        const std::span<const Element> all(elems);
        const auto kept = all.first(keep);
        const auto rest = all.subspan(keep);
        if (!leaf || split_leaf(id, rest)) {
            if (!leaf) push_to_children(id, rest);
            write_run(id, kept);
            scope.record.pushed = !rest.empty();
            scope.done();
            empty_overflowing_children(id);
            return;
        }
        // Unsplittable leaf (heavy duplicates): it stays oversized.
    }

    if (remaining < config_.quarter() && !leaf) {
        scope.done();
        fill_with(id, std::move(elems));
        return;
    }

    write_run(id, elems);
    scope.done();
}

// --- FILLBUFFER -------------------------------------------------------------------

void BufferTree::fill_buffer(NodeId id) {
    std::vector<Element> elems = load_buffer(id);
    resolve(id, elems);
    if (node(id).is_leaf()) {
        write_run(id, elems);
        return;
    }
    fill_with(id, std::move(elems));
}

bool BufferTree::needs_settle(NodeId id) const {
    const Node& n = node(id);
    if (n.runs.size() > 1 || n.ops > 0) return true;
    return std::any_of(n.runs.begin(), n.runs.end(), [&](const Run& r) { return r.epoch < epoch_; });
}

void BufferTree::settle(NodeId id) {
    std::vector<Element> elems = load_buffer(id);
    resolve(id, elems);
    write_run(id, elems);
}

void BufferTree::prune_empty_children(NodeId id) {
    Node& n = mut(id);
    for (std::size_t i = n.children.size(); i-- > 0;) {
        const NodeId c = n.children[i];
        const Node& child = node(c);
        if (!child.is_leaf() || child.elements != 0) continue;
        n.children.erase(n.children.begin() + static_cast<std::ptrdiff_t>(i));
        if (!n.separators.empty()) {
            const std::size_t drop = i == 0 ? 0 : i - 1;
            n.separators.erase(n.separators.begin() + static_cast<std::ptrdiff_t>(drop));
        }
        release_node(c);
    }
    if (n.children.empty()) n.separators.clear();
}

std::size_t BufferTree::pull_from_children(NodeId id, std::vector<Element>& data, std::vector<Element>& selected,
                                           std::size_t target, bool& stalled) {
    struct Cursor {
        NodeId child;
        std::vector<Element> block;
        std::size_t pos = 0;
        std::size_t block_index = 0;  // index in the run of the block currently loaded
        std::size_t taken = 0;
    };

    std::vector<Cursor> cursors;
    for (NodeId c : node(id).children) {
        const Node& child = node(c);
        if (child.runs.empty() || child.elements == child.ops) {
            // An internal child with a dry buffer may still hide DATA that
            // outranks everything else on offer.
            if (!child.is_leaf()) {
                stalled = true;
                return 0;
            }
            continue;
        }
        assert(child.runs.size() == 1);
        Cursor cur;
        cur.child = c;
        cur.block = store_.read(child.runs.front().blocks.front()).elements;
        cursors.push_back(std::move(cur));
    }

    std::size_t from_memory = 0;
    std::size_t pulled = 0;
    while (selected.size() < target) {
        const Element* best = from_memory < data.size() ? &data[from_memory] : nullptr;
        Cursor* best_cursor = nullptr;
        for (Cursor& cur : cursors) {
            if (cur.pos >= cur.block.size()) continue;
            const Element& e = cur.block[cur.pos];
            if (!e.is_data()) continue;
            if (best == nullptr || higher_priority(e, *best)) {
                best = &e;
                best_cursor = &cur;
            }
        }
        if (best == nullptr) break;
        selected.push_back(*best);
        if (best_cursor == nullptr) {
            ++from_memory;
            continue;
        }
        ++pulled;
        Cursor& cur = *best_cursor;
        ++cur.pos;
        ++cur.taken;
        if (cur.pos == cur.block.size()) {
            const Run& run = node(cur.child).runs.front();
            if (cur.block_index + 1 < run.blocks.size()) {
                ++cur.block_index;
                cur.block = store_.read(run.blocks[cur.block_index]).elements;
                cur.pos = 0;
            } else if (!node(cur.child).is_leaf()) {
                stalled = true;
                break;
            }
        }
    }
    data.erase(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(from_memory));

    // Give back what the children still hold: drop consumed blocks and
    // rewrite a partially consumed head block.
    for (Cursor& cur : cursors) {
        if (cur.taken == 0) continue;
        Node& child = mut(cur.child);
        Run& run = child.runs.front();
        const bool head_exhausted = cur.pos == cur.block.size();
        const std::size_t drop = cur.block_index + (head_exhausted ? 1 : 0);
        for (std::size_t i = 0; i < drop; ++i) store_.free(run.blocks[i]);
        run.blocks.erase(run.blocks.begin(), run.blocks.begin() + static_cast<std::ptrdiff_t>(drop));
        if (!head_exhausted && cur.pos > 0) {
            Block rest;
            rest.elements.assign(cur.block.begin() + static_cast<std::ptrdiff_t>(cur.pos), cur.block.end());
            store_.write(run.blocks.front(), std::move(rest));
        }
        run.size -= cur.taken;
        child.elements -= cur.taken;
        tree_data_ -= cur.taken;
        if (run.blocks.empty()) child.runs.clear();
    }
    return pulled;
}

void BufferTree::fill_with(NodeId id, std::vector<Element> in_memory) {
    PrimitiveScope scope(*this, PrimitiveKind::FillBuffer, EmptyMode::Full, id);
    const std::size_t target = config_.half() * config_.block_capacity;

    // Operations held here keep sinking; only DATA is ranked.
    std::vector<Element> data;
    std::vector<Element> ops;
    for (Element& e : in_memory) (e.is_data() ? data : ops).push_back(e);
    push_to_children(id, ops);

    std::vector<Element> selected;
    for (;;) {
        for (NodeId c : std::vector<NodeId>(node(id).children)) {
            if (needs_settle(c)) settle(c);
            const Node& child = node(c);
            if (!child.is_leaf() && blocks_for(child.elements - child.ops) < std::max<std::size_t>(1, config_.quarter())) {
                fill_buffer(c);
            }
        }
        prune_empty_children(id);
        if (node(id).is_leaf()) break;

        bool stalled = false;
        const std::size_t pulled = pull_from_children(id, data, selected, target, stalled);
        if (selected.size() >= target) break;
        if (!stalled && pulled == 0) break;
    }
    // Children drained by the merge are topped up again (they hold only
    // elements ranked below everything selected here).
    if (!node(id).is_leaf()) {
        for (NodeId c : std::vector<NodeId>(node(id).children)) {
            const Node& child = node(c);
            if (!child.is_leaf() && blocks_for(child.elements - child.ops) < std::max<std::size_t>(1, config_.quarter())) {
                fill_buffer(c);
            }
        }
        prune_empty_children(id);
    }
    if (!data.empty() && node(id).is_leaf()) {
        selected.insert(selected.end(), data.begin(), data.end());
    } else if (!data.empty()) {
        // Target reached with in-memory DATA to spare: it goes down.
        push_to_children(id, data);
        empty_overflowing_children(id);
    }

    std::sort(selected.begin(), selected.end(), HigherPriority{});
    write_run(id, selected);
    scope.done();
}

// --- inspection -------------------------------------------------------------------

std::size_t BufferTree::size() const noexcept {
    std::size_t staged = 0;
    for (const Element& e : staging_) staged += e.is_data() ? 1 : 0;
    return tree_data_ + staged + cache_.size();
}

std::size_t BufferTree::pending_ops() const noexcept {
    std::size_t staged = 0;
    for (const Element& e : staging_) staged += e.is_op() ? 1 : 0;
    return tree_ops_ + staged;
}

std::size_t BufferTree::height() const {
    std::size_t h = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const Node& n = node(stack.back());
        stack.pop_back();
        h = std::max<std::size_t>(h, n.depth + 1);
        stack.insert(stack.end(), n.children.begin(), n.children.end());
    }
    return h;
}

std::size_t BufferTree::internal_nodes() const {
    std::size_t count = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const Node& n = node(stack.back());
        stack.pop_back();
        if (!n.is_leaf()) ++count;
        stack.insert(stack.end(), n.children.begin(), n.children.end());
    }
    return count;
}

std::size_t BufferTree::node_count() const {
    std::size_t count = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const Node& n = node(stack.back());
        stack.pop_back();
        ++count;
        stack.insert(stack.end(), n.children.begin(), n.children.end());
    }
    return count;
}

std::vector<BufferTree::Located> BufferTree::scan() const {
    std::vector<Located> out;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        const Node& n = node(stack.back());
        stack.pop_back();
        for (const Run& r : n.runs) {
            for (BlockId b : r.blocks) {
                for (const Element& e : store_.inspect(b).elements) out.push_back({e, n.depth});
            }
        }
        stack.insert(stack.end(), n.children.begin(), n.children.end());
    }
    return out;
}

}  // namespace rbt
