#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbt/buffer_tree.hpp"
#include "rbt/workloads.hpp"

namespace rbt::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2 };

enum class Format { Csv, Json };

struct CommonOptions {
    std::size_t block = 64;
    std::size_t fanout = 16;
    std::uint64_t seed = 1;
    SelfAdjustMode mode = SelfAdjustMode::None;
    Format format = Format::Csv;
    std::optional<std::string> out;  // metrics destination; stdout when empty
    bool timing = true;              // false: wall_ms is written as 0

    [[nodiscard]] TreeConfig tree_config() const;
};

struct SortOptions {
    CommonOptions common;
    std::size_t n = 1000;
    std::optional<std::string> input;  // whitespace-separated keys; random when empty
    bool print_keys = false;
};

struct TraceOptions {
    CommonOptions common;
    std::string trace;
    bool print_results = true;
};

struct BenchOptions {
    CommonOptions common;
    std::vector<std::size_t> sizes{1u << 12, 1u << 13, 1u << 14};
    std::size_t seeds = 5;
    std::vector<std::string> workloads{"insert", "sort", "zipf"};
};

struct CheckOptions {
    CommonOptions common;
    std::optional<std::string> trace;
    std::size_t n = 10000;  // random trace length when no trace is given
    std::optional<FaultKind> inject;
};

// Each command writes human-readable output to `out`, diagnostics to `err`
// and returns an ExitCode.
int cmd_sort(const SortOptions& opts, std::ostream& out, std::ostream& err);
int cmd_trace(const TraceOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const CheckOptions& opts, std::ostream& out, std::ostream& err);

/// Fixed CSV header for MetricsRecord rows.
inline constexpr const char* kCsvHeader =
    "workload,n_elements,block,fanout,seed,mode,reads,writes,height,internal_nodes,wall_ms,ratio";

[[nodiscard]] std::string to_csv_row(const MetricsRecord& m);
[[nodiscard]] std::string to_json(const MetricsRecord& m);

/// Seed default: $RBT_SEED when it parses as an unsigned integer, else 1.
[[nodiscard]] std::uint64_t default_seed();

}  // namespace rbt::cli
