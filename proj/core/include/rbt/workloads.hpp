#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rbt/buffer_tree.hpp"
#include "rbt/trace.hpp"

namespace rbt {

/// One benchmark measurement. `ratio` is io_total / (n log_f n) with
/// n = N/B, and is absent when n < f.
struct MetricsRecord {
    std::string workload;
    std::size_t n_elements = 0;
    std::size_t block = 0;
    std::size_t fanout = 0;
    std::uint64_t seed = 0;
    SelfAdjustMode mode = SelfAdjustMode::None;
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::size_t height = 0;
    std::size_t internal_nodes = 0;
    double wall_ms = 0;
    std::optional<double> ratio;
};

[[nodiscard]] std::optional<double> io_ratio(std::uint64_t io_total, std::size_t n_elements, std::size_t block,
                                             std::size_t fanout);

/// Fills the tree-derived fields of a record (I/O counts, shape, ratio).
[[nodiscard]] MetricsRecord measure(const BufferTree& tree, std::string workload, std::size_t n_elements,
                                    std::uint64_t seed, double wall_ms);

/// Zipf(s) over ranks 1..n by inverse-CDF lookup.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s);
    template <typename Rng>
    std::size_t operator()(Rng& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        return sample(u);
    }
    /// Rank (0-based) whose cumulative probability first reaches u.
    [[nodiscard]] std::size_t sample(double u) const;
    [[nodiscard]] std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

/// Keys drawn uniformly from the full signed 64-bit range.
[[nodiscard]] std::vector<Key> random_keys(std::size_t n, std::uint64_t seed);

struct InsertRun {
    MetricsRecord metrics;
    std::uint64_t max_empty_own_io = 0;
    std::size_t empty_invocations = 0;
    std::size_t occupancy_failures = 0;  // KEEP_HALF pushes leaving the node outside [ceil(f/2), floor(3f/4)]
};

/// N random inserts followed by flush. `observer`, when set, also sees
/// every primitive invocation (likewise for the other runners).
[[nodiscard]] InsertRun run_insert_only(const TreeConfig& config, std::size_t n_elements,
                                        const BufferTree::Observer& observer = {});

struct SortRun {
    MetricsRecord metrics;
    std::vector<Key> output;
    bool sorted_and_complete = false;
    std::size_t refills = 0;
    std::size_t refill_violations = 0;  // pops after a refill that charged I/O
};

/// Tree-sort: N inserts followed by N deletemins.
[[nodiscard]] SortRun run_sort(const TreeConfig& config, const std::vector<Key>& keys,
                               const BufferTree::Observer& observer = {});

struct ZipfRun {
    MetricsRecord metrics;
    double hot_mean_depth = 0;
    double overall_mean_depth = 0;
    std::size_t found = 0;
    std::size_t hot_found = 0;
};

/// Inserts keys 0..num_keys-1 (shuffled), flushes, then issues Zipf(s)
/// searches whose ranks map to a random permutation of the keys, flushing
/// every `batch` searches. Depth statistics are over Found answers;
/// "hot" is the `hot_fraction` most popular ranks.
[[nodiscard]] ZipfRun run_zipf_search(const TreeConfig& config, std::size_t num_keys, std::size_t num_searches,
                                      std::size_t batch = 5000, double s = 1.0, double hot_fraction = 0.01,
                                      const BufferTree::Observer& observer = {});

/// Random mixed trace over keys [0, key_universe). Ends with a flush.
[[nodiscard]] std::vector<TraceOp> random_trace(std::size_t num_ops, Key key_universe, std::uint64_t seed);

}  // namespace rbt
