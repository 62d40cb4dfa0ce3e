#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace rbt;
using namespace rbt::cli;

void add_common(CLI::App& app, CommonOptions& opts, std::string& mode, std::string& format) {
    app.add_option("--block", opts.block, "block capacity B (elements)")->capture_default_str();
    app.add_option("--fanout", opts.fanout, "fan-out f (memory in blocks)")->capture_default_str();
    app.add_option("--seed", opts.seed, "RNG seed (default: $RBT_SEED or 1)")->capture_default_str();
    app.add_option("--mode", mode, "self-adjust mode")
        ->check(CLI::IsMember({"none", "rerandomize", "counter"}))
        ->capture_default_str();
    app.add_option("--format", format, "metrics format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", opts.out, "metrics output file");
    app.add_flag("!--no-timing", opts.timing, "write wall_ms as 0 for byte-identical output");
}

void finish_common(CommonOptions& opts, const std::string& mode, const std::string& format) {
    opts.mode = *parse_self_adjust_mode(mode);
    opts.format = format == "json" ? Format::Json : Format::Csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random buffer tree: sorting, trace replay, invariant checks and benchmarks"};
    app.require_subcommand(1);

    const std::uint64_t seed = default_seed();
    SortOptions sort;
    TraceOptions trace;
    BenchOptions bench;
    CheckOptions check;
    sort.common.seed = trace.common.seed = bench.common.seed = check.common.seed = seed;
    std::string mode = "none";
    std::string format = "csv";

    CLI::App* sort_cmd = app.add_subcommand("sort", "insert N keys, deletemin them all and verify the order");
    add_common(*sort_cmd, sort.common, mode, format);
    sort_cmd->add_option("--n", sort.n, "number of random keys")->capture_default_str();
    sort_cmd->add_option("--input", sort.input, "file of whitespace-separated keys (instead of random)");
    sort_cmd->add_flag("--print-keys", sort.print_keys, "print the sorted keys");

    CLI::App* trace_cmd = app.add_subcommand("trace", "replay a trace against the reference oracle");
    add_common(*trace_cmd, trace.common, mode, format);
    trace_cmd->add_option("--trace", trace.trace, "trace file")->required();
    trace_cmd->add_flag("!--quiet", trace.print_results, "do not print individual results");

    CLI::App* bench_cmd = app.add_subcommand("bench", "sweep workloads over sizes and seeds");
    add_common(*bench_cmd, bench.common, mode, format);
    bench_cmd->add_option("--n", bench.sizes, "element counts (comma separated)")->delimiter(',');
    bench_cmd->add_option("--seeds", bench.seeds, "seeds per size, starting at --seed")->capture_default_str();
    bench_cmd->add_option("--workload", bench.workloads, "insert, sort, zipf (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"insert", "sort", "zipf"}));

    CLI::App* check_cmd = app.add_subcommand("check", "build, flush and check the structural invariants");
    add_common(*check_cmd, check.common, mode, format);
    check_cmd->add_option("--trace", check.trace, "trace file (default: random trace)");
    check_cmd->add_option("--n", check.n, "random trace length")->capture_default_str();
    const std::map<std::string, FaultKind> faults{{"heap", FaultKind::Heap}, {"keys", FaultKind::Keys}};
    check_cmd->add_option("--inject", check.inject, "corrupt the flushed tree before checking")
        ->transform(CLI::CheckedTransformer(faults));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*sort_cmd) {
        finish_common(sort.common, mode, format);
        return cmd_sort(sort, std::cout, std::cerr);
    }
    if (*trace_cmd) {
        finish_common(trace.common, mode, format);
        return cmd_trace(trace, std::cout, std::cerr);
    }
    if (*bench_cmd) {
        finish_common(bench.common, mode, format);
        return cmd_bench(bench, std::cout, std::cerr);
    }
    finish_common(check.common, mode, format);
    return cmd_check(check, std::cout, std::cerr);
}
