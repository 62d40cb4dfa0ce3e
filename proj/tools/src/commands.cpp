#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rbt/reference.hpp"
#include "rbt/trace.hpp"

namespace rbt::cli {

namespace {

using nlohmann::ordered_json;

std::string format_double(double v, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

ordered_json record_json(const MetricsRecord& m) {
    ordered_json j;
    j["workload"] = m.workload;
    j["n_elements"] = m.n_elements;
    j["block"] = m.block;
    j["fanout"] = m.fanout;
    j["seed"] = m.seed;
    j["mode"] = std::string(to_string(m.mode));
    j["reads"] = m.reads;
    j["writes"] = m.writes;
    j["height"] = m.height;
    j["internal_nodes"] = m.internal_nodes;
    j["wall_ms"] = m.wall_ms;
    j["ratio"] = m.ratio ? ordered_json(*m.ratio) : ordered_json(nullptr);
    return j;
}

// Routes metrics to --out or to `fallback`.
class MetricsSink {
public:
    MetricsSink(const CommonOptions& opts, std::ostream& fallback) : format_(opts.format), os_(&fallback) {
        if (opts.out) {
            file_.open(*opts.out);
            if (!file_) return;
            os_ = &file_;
        }
        ok_ = true;
    }
    [[nodiscard]] bool ok() const noexcept { return ok_; }

    void record(MetricsRecord m, bool timing) {
        if (!timing) m.wall_ms = 0;
        if (format_ == Format::Csv) {
            if (!header_written_) *os_ << kCsvHeader << '\n';
            header_written_ = true;
            *os_ << to_csv_row(m) << '\n';
        } else {
            rows_.push_back(record_json(m));
        }
    }
    void summary(const std::string& workload, std::size_t n, double mean, double min, double max,
                 const CommonOptions& opts) {
        if (format_ == Format::Csv) {
            // Summary rows reuse the fixed header: seed is empty and ratio
            // carries the mean.
            *os_ << workload << "-summary," << n << ',' << opts.block << ',' << opts.fanout << ",,"
                 << to_string(opts.mode) << ",,,,,," << format_double(mean, 6) << '\n';
        } else {
            ordered_json j;
            j["workload"] = workload;
            j["n_elements"] = n;
            j["ratio_mean"] = mean;
            j["ratio_min"] = min;
            j["ratio_max"] = max;
            summaries_.push_back(std::move(j));
        }
    }
    void finish() {
        if (format_ != Format::Json) return;
        if (summaries_.empty() && rows_.size() == 1) {
            *os_ << rows_.front().dump(2) << '\n';
        } else {
            ordered_json doc;
            doc["runs"] = rows_;
            doc["summary"] = summaries_;
            *os_ << doc.dump(2) << '\n';
        }
        os_->flush();
    }

private:
    Format format_;
    std::ofstream file_;
    std::ostream* os_;
    bool ok_ = false;
    bool header_written_ = false;
    std::vector<ordered_json> rows_;
    std::vector<ordered_json> summaries_;
};

bool valid_params(const CommonOptions& opts, std::ostream& err) {
    try {
        opts.tree_config().validate();
        return true;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return false;
    }
}

std::optional<std::vector<TraceOp>> load_trace(const std::string& path, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot read trace file " << path << '\n';
        return std::nullopt;
    }
    try {
        return parse_trace(in);
    } catch (const TraceParseError& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return std::nullopt;
    }
}

std::optional<std::vector<Key>> load_keys(const std::string& path, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot read input file " << path << '\n';
        return std::nullopt;
    }
    std::vector<Key> keys;
    std::string token;
    while (in >> token) {
        Key k = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), k);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            err << "error: " << path << ": not a 64-bit key: " << token << '\n';
            return std::nullopt;
        }
        keys.push_back(k);
    }
    return keys;
}

}  // namespace

TreeConfig CommonOptions::tree_config() const {
    TreeConfig c;
    c.block_capacity = block;
    c.fanout = fanout;
    c.rng_seed = seed;
    c.selfadjust_mode = mode;
    return c;
}

std::string to_csv_row(const MetricsRecord& m) {
    std::ostringstream os;
    os << m.workload << ',' << m.n_elements << ',' << m.block << ',' << m.fanout << ',' << m.seed << ','
       << to_string(m.mode) << ',' << m.reads << ',' << m.writes << ',' << m.height << ',' << m.internal_nodes << ','
       << format_double(m.wall_ms, 3) << ',' << (m.ratio ? format_double(*m.ratio, 6) : "null");
    return os.str();
}

std::string to_json(const MetricsRecord& m) { return record_json(m).dump(); }

std::uint64_t default_seed() {
    const char* env = std::getenv("RBT_SEED");
    if (env == nullptr) return 1;
    const std::string_view text(env);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    return ec == std::errc() && ptr == text.data() + text.size() ? seed : 1;
}

int cmd_sort(const SortOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_params(opts.common, err)) return kUsage;
    std::vector<Key> keys;
    if (opts.input) {
        auto loaded = load_keys(*opts.input, err);
        if (!loaded) return kUsage;
        keys = std::move(*loaded);
    } else {
        keys = random_keys(opts.n, opts.common.seed);
    }
    MetricsSink sink(opts.common, out);
    if (!sink.ok()) {
        err << "error: cannot write " << *opts.common.out << '\n';
        return kUsage;
    }

    const SortRun run = run_sort(opts.common.tree_config(), keys);
    if (opts.print_keys) {
        for (Key k : run.output) out << k << '\n';
    }
    sink.record(run.metrics, opts.common.timing);
    sink.finish();
    if (!run.sorted_and_complete) {
        err << "verification failed: output is not the sorted input multiset\n";
        return kVerifyFailed;
    }
    return kOk;
}

int cmd_trace(const TraceOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_params(opts.common, err)) return kUsage;
    const auto trace = load_trace(opts.trace, err);
    if (!trace) return kUsage;
    MetricsSink sink(opts.common, out);
    if (!sink.ok()) {
        err << "error: cannot write " << *opts.common.out << '\n';
        return kUsage;
    }

    BufferTree tree(opts.common.tree_config());
    const auto start = std::chrono::steady_clock::now();
    ReplayLog log = replay(tree, *trace);
    tree.flush();
    for (const ResultEvent& ev : tree.poll_results()) log.answers.push_back(ev);
    const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    std::sort(log.answers.begin(), log.answers.end(),
              [](const ResultEvent& a, const ResultEvent& b) { return a.ticket < b.ticket; });
    if (opts.print_results) {
        for (const ResultEvent& ev : log.answers) out << ev << '\n';
    }

    std::map<char, std::size_t> counts;
    std::size_t inserts = 0;
    for (const TraceOp& op : *trace) {
        ++counts[static_cast<char>(op.verb)];
        if (op.verb == TraceOp::Verb::Insert) ++inserts;
    }
    out << "ops:";
    for (const auto& [verb, count] : counts) out << ' ' << verb << '=' << count;
    out << '\n';

    const OracleReport report = verify_against_reference(log.ops, log.answers, stored_data(tree));
    const std::vector<Violation> violations = tree.check_invariants();
    out << "oracle: checked=" << report.checked << " mismatches=" << report.mismatches.size() << '\n';
    out << "invariants: violations=" << violations.size() << '\n';
    for (const std::string& m : report.mismatches) err << "mismatch: " << m << '\n';
    for (const Violation& v : violations) err << "violation: " << describe(v) << '\n';

    sink.record(measure(tree, "trace", inserts, opts.common.seed, wall), opts.common.timing);
    sink.finish();
    return report.ok() && violations.empty() ? kOk : kVerifyFailed;
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_params(opts.common, err)) return kUsage;
    for (const std::string& w : opts.workloads) {
        if (w != "insert" && w != "sort" && w != "zipf") {
            err << "error: unknown workload " << w << '\n';
            return kUsage;
        }
    }
    MetricsSink sink(opts.common, out);
    if (!sink.ok()) {
        err << "error: cannot write " << *opts.common.out << '\n';
        return kUsage;
    }

    bool verified = true;
    for (const std::string& workload : opts.workloads) {
        for (std::size_t n : opts.sizes) {
            std::vector<double> ratios;
            for (std::size_t i = 0; i < opts.seeds; ++i) {
                CommonOptions run_opts = opts.common;
                run_opts.seed = opts.common.seed + i;
                const TreeConfig config = run_opts.tree_config();
                MetricsRecord m;
                if (workload == "insert") {
                    m = run_insert_only(config, n).metrics;
                } else if (workload == "sort") {
                    const SortRun run = run_sort(config, random_keys(n, run_opts.seed));
                    verified = verified && run.sorted_and_complete;
                    m = run.metrics;
                } else {
                    m = run_zipf_search(config, n, 10 * n).metrics;
                }
                if (m.ratio) ratios.push_back(*m.ratio);
                sink.record(m, opts.common.timing);
            }
            if (!ratios.empty()) {
                double sum = 0;
                for (double r : ratios) sum += r;
                const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
                sink.summary(workload, n, sum / static_cast<double>(ratios.size()), *lo, *hi, opts.common);
            }
        }
    }
    sink.finish();
    if (!verified) {
        err << "verification failed: a sort run produced wrong output\n";
        return kVerifyFailed;
    }
    return kOk;
}

int cmd_check(const CheckOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_params(opts.common, err)) return kUsage;
    std::vector<TraceOp> trace;
    if (opts.trace) {
        auto loaded = load_trace(*opts.trace, err);
        if (!loaded) return kUsage;
        trace = std::move(*loaded);
    } else {
        trace = random_trace(opts.n, static_cast<Key>(std::max<std::size_t>(1, opts.n / 2)), opts.common.seed);
    }

    BufferTree tree(opts.common.tree_config());
    (void)replay(tree, trace);
    tree.flush();
    if (opts.inject && !tree.inject_fault(*opts.inject)) {
        err << "error: tree too small to inject a fault\n";
        return kUsage;
    }
    const std::vector<Violation> violations = tree.check_invariants();
    for (const Violation& v : violations) out << describe(v) << '\n';
    out << "violations: " << violations.size() << " (nodes=" << tree.node_count() << " height=" << tree.height()
        << ")\n";
    return violations.empty() ? kOk : kVerifyFailed;
}

}  // namespace rbt::cli
