#include "rbt/workloads.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace rbt {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Seeds for workload data are derived from, but distinct from, the tree's
// priority seed.
std::uint64_t data_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL; }

}  // namespace

std::optional<double> io_ratio(std::uint64_t io_total, std::size_t n_elements, std::size_t block,
                               std::size_t fanout) {
    const double n = static_cast<double>(n_elements) / static_cast<double>(block);
    if (n < static_cast<double>(fanout)) return std::nullopt;
    const double log_f_n = std::log(n) / std::log(static_cast<double>(fanout));
    return static_cast<double>(io_total) / (n * log_f_n);
}

MetricsRecord measure(const BufferTree& tree, std::string workload, std::size_t n_elements, std::uint64_t seed,
                      double wall_ms) {
    const TreeConfig& cfg = tree.config();
    const IoStats io = tree.io_stats();
    MetricsRecord m;
    m.workload = std::move(workload);
    m.n_elements = n_elements;
    m.block = cfg.block_capacity;
    m.fanout = cfg.fanout;
    m.seed = seed;
    m.mode = cfg.selfadjust_mode;
    m.reads = io.reads;
    m.writes = io.writes;
    m.height = tree.height();
    m.internal_nodes = tree.internal_nodes();
    m.wall_ms = wall_ms;
    m.ratio = io_ratio(io.total(), n_elements, cfg.block_capacity, cfg.fanout);
    return m;
}

ZipfSampler::ZipfSampler(std::size_t n, double s) : cdf_(n) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += 1.0 / std::pow(static_cast<double>(i + 1), s);
        cdf_[i] = total;
    }
    for (double& c : cdf_) c /= total;
}

std::size_t ZipfSampler::sample(double u) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::size_t>(it - cdf_.begin());
}

std::vector<Key> random_keys(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(data_seed(seed));
    std::vector<Key> keys(n);
    for (Key& k : keys) k = static_cast<Key>(rng());
    return keys;
}

InsertRun run_insert_only(const TreeConfig& config, std::size_t n_elements, const BufferTree::Observer& observer) {
    BufferTree tree(config);
    InsertRun run;
    const std::size_t lo = config.half();
    const std::size_t hi = config.three_quarters();
    tree.set_observer([&](const PrimitiveRecord& r) {
        if (observer) observer(r);
        if (r.kind != PrimitiveKind::EmptyBuffer) return;
        ++run.empty_invocations;
        run.max_empty_own_io = std::max(run.max_empty_own_io, r.own_io);
        if (r.mode == EmptyMode::KeepHalf && r.pushed && (r.blocks_after < lo || r.blocks_after > hi)) {
            ++run.occupancy_failures;
        }
    });
    const auto keys = random_keys(n_elements, config.rng_seed);
    const auto start = Clock::now();
    for (std::size_t i = 0; i < keys.size(); ++i) tree.insert(keys[i], i);
    tree.flush();
    run.metrics = measure(tree, "insert", n_elements, config.rng_seed, elapsed_ms(start));
    return run;
}

SortRun run_sort(const TreeConfig& config, const std::vector<Key>& keys, const BufferTree::Observer& observer) {
    BufferTree tree(config);
    if (observer) tree.set_observer(observer);
    SortRun run;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < keys.size(); ++i) tree.insert(keys[i], i);
    run.output.reserve(keys.size());
    std::size_t zero_io_pops_left = 0;
    for (;;) {
        const bool will_refill = tree.min_cache().empty();
        const std::uint64_t before = tree.io_stats().total();
        const ResultEvent ev = tree.delete_min();
        if (ev.outcome != Outcome::Min) break;
        run.output.push_back(ev.key);
        if (will_refill) {
            ++run.refills;
            zero_io_pops_left = tree.min_cache().size();
        } else {
            if (zero_io_pops_left > 0 && tree.io_stats().total() != before) ++run.refill_violations;
            if (zero_io_pops_left > 0) --zero_io_pops_left;
        }
    }
    run.metrics = measure(tree, "sort", keys.size(), config.rng_seed, elapsed_ms(start));
    std::vector<Key> expected = keys;
    std::sort(expected.begin(), expected.end());
    run.sorted_and_complete = run.output == expected;
    return run;
}

ZipfRun run_zipf_search(const TreeConfig& config, std::size_t num_keys, std::size_t num_searches, std::size_t batch,
                        double s, double hot_fraction, const BufferTree::Observer& observer) {
    BufferTree tree(config);
    if (observer) tree.set_observer(observer);
    ZipfRun run;
    std::mt19937_64 rng(data_seed(config.rng_seed));

    std::vector<Key> keys(num_keys);
    std::iota(keys.begin(), keys.end(), Key{0});
    std::shuffle(keys.begin(), keys.end(), rng);
    // rank -> key; the hottest ranks are spread over the key space
    std::vector<Key> by_rank = keys;
    std::shuffle(by_rank.begin(), by_rank.end(), rng);
    const auto hot_count = static_cast<std::size_t>(std::ceil(hot_fraction * static_cast<double>(num_keys)));
    std::vector<bool> hot(num_keys, false);
    for (std::size_t r = 0; r < hot_count && r < num_keys; ++r) hot[static_cast<std::size_t>(by_rank[r])] = true;

    const auto start = Clock::now();
    for (Key k : keys) tree.insert(k, static_cast<Payload>(k));
    tree.flush();
    (void)tree.poll_results();

    const ZipfSampler zipf(num_keys, s);
    double depth_sum = 0;
    double hot_depth_sum = 0;
    const auto account = [&] {
        for (const ResultEvent& ev : tree.poll_results()) {
            if (ev.outcome != Outcome::Found) continue;
            ++run.found;
            depth_sum += ev.depth;
            if (hot[static_cast<std::size_t>(ev.key)]) {
                ++run.hot_found;
                hot_depth_sum += ev.depth;
            }
        }
    };
    for (std::size_t i = 0; i < num_searches; ++i) {
        tree.search(by_rank[zipf(rng)]);
        if ((i + 1) % batch == 0) {
            tree.flush();
            account();
        }
    }
    tree.flush();
    account();

    run.metrics = measure(tree, "zipf", num_keys, config.rng_seed, elapsed_ms(start));
    run.overall_mean_depth = run.found ? depth_sum / static_cast<double>(run.found) : 0;
    run.hot_mean_depth = run.hot_found ? hot_depth_sum / static_cast<double>(run.hot_found) : 0;
    return run;
}

std::vector<TraceOp> random_trace(std::size_t num_ops, Key key_universe, std::uint64_t seed) {
    std::mt19937_64 rng(data_seed(seed));
    std::uniform_int_distribution<Key> key(0, key_universe - 1);
    std::uniform_int_distribution<int> pick(0, 99);
    std::vector<TraceOp> trace;
    trace.reserve(num_ops + 1);
    for (std::size_t i = 0; i < num_ops; ++i) {
        TraceOp op;
        op.line = i + 1;
        const int p = pick(rng);
        if (p < 50) {
            op.verb = TraceOp::Verb::Insert;
            op.key = key(rng);
            op.payload = rng() % 1000;
        } else if (p < 68) {
            op.verb = TraceOp::Verb::Delete;
            op.key = key(rng);
        } else if (p < 88) {
            op.verb = TraceOp::Verb::Search;
            op.key = key(rng);
        } else if (p < 96) {
            op.verb = TraceOp::Verb::DeleteMin;
        } else {
            op.verb = TraceOp::Verb::Flush;
        }
        trace.push_back(op);
    }
    trace.push_back(TraceOp{TraceOp::Verb::Flush, 0, 0, num_ops + 1});
    return trace;
}

}  // namespace rbt
