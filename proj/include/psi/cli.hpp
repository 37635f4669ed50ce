// Command-line front end: single-correlator queries, epsilon tables over
// Pi / Pi_L families, bound verification, lambda tables and cache
// inspection. Kept in a header (with a thin main in tools/) so the command
// layer is exercisable from the test suite in-process.
//
// Exit codes are a stable scripting contract:
//   0 success, 1 usage/validation error, 2 bound violation found,
//   3 work budget exhausted.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psi/arith.hpp"
#include "psi/bounds.hpp"
#include "psi/cache_io.hpp"
#include "psi/correlator.hpp"
#include "psi/partition.hpp"
#include "psi/sweep.hpp"

namespace psi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitBudget = 3;

enum class OutputFormat { Text, Csv, Json };

struct RunConfig {
    enum class Command { Compute, Table, VerifyBounds, VerifyTwoPoint, LambdaTable, CacheInfo };
    Command command = Command::Compute;
    long long g = 0;
    long long n = 0;
    long long L = -1;  // -1: not given
    std::optional<Partition> partition;
    std::optional<std::string> cache_path;
    std::optional<std::string> out_path;
    OutputFormat format = OutputFormat::Text;
    int workers = 1;
    std::uint64_t work_budget = kDefaultWorkBudget;
};

namespace cli_detail {

// Decimal renderings are always 12 significant digits and labeled approx;
// the exact "num/den" strings remain authoritative.
inline std::string approx12(const ExactRational& v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v.approx());
    return buf;
}

inline nlohmann::ordered_json rational_json(const ExactRational& v) {
    return nlohmann::ordered_json{{"num", v.numerator().get_str()},
                                  {"den", v.denominator().get_str()}};
}

struct OutputSink {
    std::ostream* out = nullptr;
    std::ofstream file;

    // Returns false (usage error) when the path cannot be opened.
    bool open(const std::optional<std::string>& path, std::ostream& fallback) {
        if (!path) {
            out = &fallback;
            return true;
        }
        file.open(*path, std::ios::binary | std::ios::trunc);
        if (!file) {
            std::cerr << "error: cannot write output path '" << *path << "'\n";
            return false;
        }
        out = &file;
        return true;
    }
};

inline int fail_usage(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitUsage;
}

inline std::optional<ExactRational> table_lambda(const RunConfig& cfg) {
    if (cfg.L < 0)
        return std::nullopt;
    return lambda_bound(cfg.g, cfg.L);
}

inline int cmd_compute(const RunConfig& cfg, CorrelatorEngine& engine) {
    const Partition& d = *cfg.partition;
    const auto n = static_cast<long long>(d.size());
    const long long required = 3 * cfg.g - 3 + n;
    if (!dimension_ok(cfg.g, d))
        return fail_usage("partition " + to_text(d) + " has sum " +
                          std::to_string(part_sum(d)) + " but g=" + std::to_string(cfg.g) +
                          ", n=" + std::to_string(n) + " requires 3g-3+n = " +
                          std::to_string(required));

    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;

    const ExactRational value = engine.correlator(cfg.g, d);
    std::optional<ExactRational> floor_v, eps_v;
    if (cfg.g >= 1) {
        floor_v = floor_bracket(cfg.g, d);
        eps_v = value / *floor_v - ExactRational(1);
    }

    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::ordered_json j;
            j["command"] = "compute";
            j["g"] = cfg.g;
            j["n"] = n;
            j["partition"] = to_text(canonicalize(d));
            j["correlator"] = rational_json(value);
            j["correlator_approx"] = approx12(value);
            if (floor_v) {
                j["floor"] = rational_json(*floor_v);
                j["floor_approx"] = approx12(*floor_v);
                j["epsilon"] = rational_json(*eps_v);
                j["epsilon_approx"] = approx12(*eps_v);
            }
            *sink.out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv: {
            write_report_csv_header(*sink.out);
            *sink.out << cfg.g << ',' << n << ',' << '"' << to_text(canonicalize(d)) << '"' << ','
                      << value.str() << ',';
            if (floor_v)
                *sink.out << floor_v->str() << ',' << eps_v->str();
            else
                *sink.out << ',';
            *sink.out << ",,\n";
            break;
        }
        case OutputFormat::Text: {
            *sink.out << "g:          " << cfg.g << "\n"
                      << "partition:  " << to_text(canonicalize(d)) << "\n"
                      << "n:          " << n << "\n"
                      << "correlator: " << value.str() << "   (approx " << approx12(value)
                      << ")\n";
            if (floor_v)
                *sink.out << "floor:      " << floor_v->str() << "   (approx "
                          << approx12(*floor_v) << ")\n"
                          << "epsilon:    " << eps_v->str() << "   (approx " << approx12(*eps_v)
                          << ")\n";
            break;
        }
    }
    return kExitOk;
}

inline int cmd_table(const RunConfig& cfg, CorrelatorEngine& engine) {
    const std::optional<ExactRational> lambda = table_lambda(cfg);

    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;

    std::set<Partition> canonical;
    std::uint64_t ordered = 0;
    const long long m = 3 * cfg.g - 3 + cfg.n;
    if (m >= 0) {
        Partition d;
        if (cfg.L >= 0) {
            PiLEnumerator stream(m, static_cast<int>(cfg.n), cfg.L);
            while (stream.next(d)) {
                ++ordered;
                canonical.insert(canonicalize(d));
            }
        } else {
            PartitionEnumerator stream(m, static_cast<int>(cfg.n));
            while (stream.next(d)) {
                ++ordered;
                canonical.insert(canonicalize(d));
            }
        }
    }

    std::vector<EpsilonReport> rows;
    rows.reserve(canonical.size());
    for (const auto& d : canonical)
        rows.push_back(make_epsilon_report(engine, cfg.g, d, lambda));

    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::ordered_json j;
            j["command"] = "table";
            j["g"] = cfg.g;
            j["n"] = cfg.n;
            if (cfg.L >= 0)
                j["L"] = cfg.L;
            j["ordered_checked"] = ordered;
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : rows) {
                nlohmann::ordered_json row;
                row["partition"] = to_text(r.key.parts);
                row["n"] = r.key.parts.size();
                row["correlator"] = rational_json(r.exact_value);
                row["floor"] = rational_json(r.floor_value);
                row["epsilon"] = rational_json(r.epsilon);
                row["epsilon_approx"] = approx12(r.epsilon);
                if (r.lambda_bound) {
                    row["lambda"] = rational_json(*r.lambda_bound);
                    row["satisfied"] = r.bound_satisfied;
                }
                arr.push_back(std::move(row));
            }
            j["rows"] = arr;
            *sink.out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Csv:
        case OutputFormat::Text: {
            write_report_csv_header(*sink.out);
            for (const auto& r : rows)
                write_report_csv_row(*sink.out, r);
            break;
        }
    }
    return kExitOk;
}

inline int summary_exit_code(const SweepSummary& summary) {
    if (!summary.complete)
        return kExitBudget;
    return summary.violations.empty() ? kExitOk : kExitViolation;
}

// CSV form of a sweep: one EpsilonReport row per canonical partition.
// Values are memo hits after the sweep itself, so this is cheap; if the
// sweep already ran out of budget the row pass stops where it stops.
inline int render_summary_csv(const RunConfig& cfg, CorrelatorEngine& engine,
                              const SweepSummary& summary,
                              const std::vector<Partition>& keys,
                              const std::optional<ExactRational>& lambda) {
    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;
    write_report_csv_header(*sink.out);
    try {
        for (const auto& d : keys)
            write_report_csv_row(*sink.out, make_epsilon_report(engine, summary.g, d, lambda));
    } catch (const WorkBudgetExhausted&) {
        return kExitBudget;
    }
    return summary_exit_code(summary);
}

inline int render_summary(const RunConfig& cfg, const char* command, const SweepSummary& summary,
                          const std::optional<ExactRational>& lambda) {
    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;

    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::ordered_json j;
            j["command"] = command;
            const nlohmann::ordered_json base = summary_to_json(summary);
            for (const auto& [k, v] : base.items())
                j[k] = v;
            if (lambda)
                j["lambda"] = lambda->str();
            *sink.out << j.dump(2) << '\n';
            break;
        }
        default: {
            *sink.out << command << ": g=" << summary.g << " n<=" << summary.n
                      << " L=" << summary.L << "\n"
                      << "ordered partitions:   " << summary.ordered_checked << "\n"
                      << "canonical computed:   " << summary.canonical_checked << "\n";
            if (lambda)
                *sink.out << "lambda(g,L):          " << lambda->str() << "   (approx "
                          << approx12(*lambda) << ")\n";
            if (summary.min_epsilon)
                *sink.out << "min epsilon:          " << summary.min_epsilon->str()
                          << "   (approx " << approx12(*summary.min_epsilon) << ")\n";
            if (summary.max_epsilon)
                *sink.out << "max epsilon:          " << summary.max_epsilon->str()
                          << "   (approx " << approx12(*summary.max_epsilon) << ")\n";
            *sink.out << "violations:           " << summary.violations.size() << "\n";
            for (const auto& d : summary.violations)
                *sink.out << "  violated by " << to_text(d) << "\n";
            if (!summary.complete)
                *sink.out << "INCOMPLETE: work budget exhausted before the sweep finished\n";
            break;
        }
    }
    return summary_exit_code(summary);
}

inline int cmd_verify_bounds(const RunConfig& cfg, CorrelatorEngine& engine) {
    const SweepSummary summary = verify_theorem(engine, cfg.g, cfg.n, cfg.L, cfg.workers);
    const ExactRational lambda = lambda_bound(cfg.g, cfg.L);
    if (cfg.format == OutputFormat::Csv)
        return render_summary_csv(cfg, engine, summary,
                                  canonical_pi_l_family(cfg.g, cfg.n, cfg.L).keys, lambda);
    return render_summary(cfg, "verify-bounds", summary, lambda);
}

inline int cmd_verify_two_point(const RunConfig& cfg, CorrelatorEngine& engine) {
    const SweepSummary summary = verify_two_point(engine, cfg.g);
    if (cfg.format == OutputFormat::Csv)
        return render_summary_csv(cfg, engine, summary, canonical_two_point_family(cfg.g),
                                  std::nullopt);
    return render_summary(cfg, "verify-two-point", summary, std::nullopt);
}

inline int cmd_lambda_table(const RunConfig& cfg) {
    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;

    const long long l_cap = cfg.L >= 0 ? cfg.L : cfg.g - 1;
    switch (cfg.format) {
        case OutputFormat::Json: {
            nlohmann::ordered_json j;
            j["command"] = "lambda-table";
            j["g_max"] = cfg.g;
            auto arr = nlohmann::ordered_json::array();
            for (long long g = 1; g <= cfg.g; ++g)
                for (long long L = 0; L <= std::min(l_cap, g - 1); ++L) {
                    const ExactRational v = lambda_bound(g, L);
                    arr.push_back(nlohmann::ordered_json{{"g", g},
                                                         {"L", L},
                                                         {"lambda", rational_json(v)},
                                                         {"lambda_approx", approx12(v)}});
                }
            j["rows"] = arr;
            *sink.out << j.dump(2) << '\n';
            break;
        }
        default: {
            *sink.out << "g,L,lambda,lambda_approx\n";
            for (long long g = 1; g <= cfg.g; ++g)
                for (long long L = 0; L <= std::min(l_cap, g - 1); ++L) {
                    const ExactRational v = lambda_bound(g, L);
                    *sink.out << g << ',' << L << ',' << v.str() << ',' << approx12(v) << '\n';
                }
            break;
        }
    }
    return kExitOk;
}

inline int cmd_cache_info(const RunConfig& cfg) {
    MemoCache cache;
    std::size_t records = 0;
    try {
        records = load_cache(std::filesystem::path(*cfg.cache_path), cache);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    OutputSink sink;
    if (!sink.open(cfg.out_path, std::cout))
        return kExitUsage;

    long long g_min = -1, g_max = -1, n_max = 0;
    for (const auto& [key, value] : cache.sorted_entries()) {
        g_min = g_min < 0 ? key.genus : std::min(g_min, key.genus);
        g_max = std::max(g_max, key.genus);
        n_max = std::max(n_max, static_cast<long long>(key.parts.size()));
    }
    if (cfg.format == OutputFormat::Json) {
        nlohmann::ordered_json j;
        j["command"] = "cache-info";
        j["path"] = *cfg.cache_path;
        j["records"] = records;
        if (records) {
            j["genus_min"] = g_min;
            j["genus_max"] = g_max;
            j["n_max"] = n_max;
        }
        *sink.out << j.dump(2) << '\n';
    } else {
        *sink.out << "cache:   " << *cfg.cache_path << "\n"
                  << "records: " << records << "\n";
        if (records)
            *sink.out << "genus:   " << g_min << ".." << g_max << "\n"
                      << "max n:   " << n_max << "\n";
    }
    return kExitOk;
}

}  // namespace cli_detail

// Parses argv and runs one command. Never throws; failures map onto the
// exit-code contract above.
inline int run_cli(int argc, const char* const* argv) {
    using cli_detail::fail_usage;

    RunConfig cfg;
    std::string d_text, format_text = "text";

    CLI::App app{"exact psi-class intersection numbers via the Virasoro (DVV) recursion"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool with_workers) {
        sub->add_option("--format", format_text, "output format: text, csv or json")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        sub->add_option("--cache", cfg.cache_path,
                        "correlator cache file, loaded before and saved after the command");
        sub->add_option("--out", cfg.out_path, "write output to this path instead of stdout");
        sub->add_option("--budget", cfg.work_budget, "recursion node cap")
            ->check(CLI::PositiveNumber);
        if (with_workers)
            sub->add_option("--workers", cfg.workers, "worker threads for sweeps")
                ->check(CLI::PositiveNumber);
    };

    auto* compute = app.add_subcommand("compute", "one correlator with floor bracket and epsilon");
    compute->add_option("--g", cfg.g, "genus")->required()->check(CLI::NonNegativeNumber);
    compute->add_option("--d", d_text, "partition, comma separated, e.g. 1,4")->required();
    add_common(compute, false);

    auto* table = app.add_subcommand("table", "epsilon table over canonical partitions");
    table->add_option("--g", cfg.g, "genus")->required()->check(CLI::PositiveNumber);
    table->add_option("--n", cfg.n, "number of parts")->required()->check(CLI::PositiveNumber);
    table->add_option("--L", cfg.L, "restrict to Pi_L and report the lambda bound");
    add_common(table, false);

    auto* verify = app.add_subcommand("verify-bounds",
                                      "check epsilon(d) >= lambda(g,L)-1 over Pi_L families");
    verify->add_option("--g", cfg.g, "genus")->required()->check(CLI::PositiveNumber);
    verify->add_option("--n", cfg.n, "largest number of parts")->required()->check(CLI::PositiveNumber);
    verify->add_option("--L", cfg.L, "Pi_L parameter, 0 <= L < g")->required();
    add_common(verify, true);

    auto* two_point = app.add_subcommand("verify-two-point",
                                         "check the exact two-point endpoints and strict sandwich");
    two_point->add_option("--g", cfg.g, "genus")->required()->check(CLI::PositiveNumber);
    add_common(two_point, false);

    auto* lambda_table = app.add_subcommand("lambda-table", "table of lambda(g,L)");
    lambda_table->add_option("--g", cfg.g, "largest genus")->required()->check(CLI::PositiveNumber);
    lambda_table->add_option("--L", cfg.L, "largest L (default g-1)");
    add_common(lambda_table, false);

    auto* cache_info = app.add_subcommand("cache-info", "inspect a correlator cache file");
    cache_info->add_option("--cache", cfg.cache_path, "cache file to inspect")->required();
    cache_info->add_option("--format", format_text, "output format: text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cache_info->add_option("--out", cfg.out_path, "write output to this path instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            app.exit(e);
            return kExitOk;
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    cfg.format = format_text == "json" ? OutputFormat::Json
                 : format_text == "csv" ? OutputFormat::Csv
                                        : OutputFormat::Text;

    try {
        if (compute->parsed()) {
            cfg.command = RunConfig::Command::Compute;
            try {
                cfg.partition = partition_from_text(d_text);
            } catch (const std::invalid_argument& e) {
                return fail_usage(e.what());
            }
        } else if (table->parsed()) {
            cfg.command = RunConfig::Command::Table;
        } else if (verify->parsed()) {
            cfg.command = RunConfig::Command::VerifyBounds;
        } else if (two_point->parsed()) {
            cfg.command = RunConfig::Command::VerifyTwoPoint;
        } else if (lambda_table->parsed()) {
            cfg.command = RunConfig::Command::LambdaTable;
        } else {
            cfg.command = RunConfig::Command::CacheInfo;
        }

        if ((table->count("--L") || lambda_table->count("--L")) && cfg.L < 0)
            return fail_usage("--L must be >= 0 (got " + std::to_string(cfg.L) + ")");

        // lambda domain: whenever lambda(g, L) will be evaluated, L < g
        if ((cfg.command == RunConfig::Command::VerifyBounds ||
             (cfg.command == RunConfig::Command::Table && cfg.L >= 0)) &&
            !(0 <= cfg.L && cfg.L < cfg.g))
            return fail_usage("need 0 <= L < g for the lambda bound (got g=" +
                              std::to_string(cfg.g) + ", L=" + std::to_string(cfg.L) + ")");

        if (cfg.command == RunConfig::Command::LambdaTable)
            return cli_detail::cmd_lambda_table(cfg);
        if (cfg.command == RunConfig::Command::CacheInfo)
            return cli_detail::cmd_cache_info(cfg);

        EngineOptions opts;
        opts.work_budget = cfg.work_budget;
        CorrelatorEngine engine(opts);
        if (cfg.cache_path && std::filesystem::exists(*cfg.cache_path)) {
            try {
                load_cache(std::filesystem::path(*cfg.cache_path), engine.cache());
            } catch (const std::exception& e) {
                return fail_usage(e.what());
            }
        }

        int code = kExitUsage;
        switch (cfg.command) {
            case RunConfig::Command::Compute:
                code = cli_detail::cmd_compute(cfg, engine);
                break;
            case RunConfig::Command::Table:
                code = cli_detail::cmd_table(cfg, engine);
                break;
            case RunConfig::Command::VerifyBounds:
                code = cli_detail::cmd_verify_bounds(cfg, engine);
                break;
            case RunConfig::Command::VerifyTwoPoint:
                code = cli_detail::cmd_verify_two_point(cfg, engine);
                break;
            default:
                break;
        }

        if (cfg.cache_path)
            save_cache(engine.cache(), std::filesystem::path(*cfg.cache_path));
        return code;
    } catch (const WorkBudgetExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace psi
