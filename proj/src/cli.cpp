#include "levyfluct/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "levyfluct/config.hpp"
#include "levyfluct/error.hpp"
#include "levyfluct/fluctuation_identities.hpp"
#include "levyfluct/report.hpp"
#include "levyfluct/scale_functions.hpp"
#include "levyfluct/skorokhod_simulator.hpp"

namespace levyfluct {

namespace {

struct CommonFlags {
    std::string config;
    RunParameters params;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "process config (JSON)")->required();
    cmd->add_option("--q", flags.params.q, "killing rate q >= 0");
    cmd->add_option("--alpha", flags.params.alpha, "transform argument alpha");
    cmd->add_option("--theta", flags.params.theta, "upper local time argument theta >= 0");
    cmd->add_option("--x0", flags.params.x0, "starting point");
    cmd->add_option("--b", flags.params.b, "upper barrier B > 0");
    cmd->add_option("--dt", flags.params.dt, "Euler step");
    cmd->add_option("--backend", flags.params.backend, "scale function backend")
        ->check(CLI::IsMember({"closed", "numeric"}));
    cmd->add_option("--paths", flags.params.n_paths, "Monte Carlo replications");
    cmd->add_option("--seed", flags.params.seed, "master seed");
    cmd->add_option("--out", flags.params.output, "output file");
}

template <typename T>
void overlay(std::optional<T>& base, const std::optional<T>& flag) {
    if (flag) base = flag;
}

RunConfig load(const CommonFlags& flags) {
    RunConfig cfg = parse_config_file(flags.config);
    auto& p = cfg.params;
    const auto& f = flags.params;
    overlay(p.q, f.q);
    overlay(p.alpha, f.alpha);
    overlay(p.theta, f.theta);
    overlay(p.x0, f.x0);
    overlay(p.b, f.b);
    overlay(p.dt, f.dt);
    overlay(p.backend, f.backend);
    overlay(p.n_paths, f.n_paths);
    overlay(p.seed, f.seed);
    overlay(p.output, f.output);
    // Re-run the config checks on the merged values.
    return parse_config(emit_config(cfg));
}

template <typename T>
T need(const std::optional<T>& v, const char* flag) {
    if (!v) throw Error(ErrorKind::InvalidValue, fmt::format("missing required parameter --{}", flag));
    return *v;
}

ScaleEvaluator evaluator_for(const RunConfig& cfg, double q) {
    if (cfg.params.backend == std::optional<std::string>("numeric")) {
        return make_evaluator(cfg.process, q, Backend::NumericInversion);
    }
    return make_evaluator_preferring_closed_form(cfg.process, q);
}

Parallelism parallelism_from_env() {
    const char* raw = std::getenv("LEVYFLUCT_THREADS");
    if (raw == nullptr || *raw == '\0') return {};
    char* end = nullptr;
    const long n = std::strtol(raw, &end, 10);
    if (*end != '\0' || n < 1) {
        throw Error(ErrorKind::InvalidValue, fmt::format("LEVYFLUCT_THREADS must be a positive integer, got '{}'", raw));
    }
    return Parallelism{static_cast<unsigned>(n)};
}

// Writes to --out when given, otherwise to `fallback`.
template <typename Fn>
void with_output(const std::optional<std::string>& path, std::ostream& fallback, Fn&& fn) {
    if (!path) {
        fn(fallback);
        return;
    }
    std::ofstream file(*path);
    if (!file) throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", *path));
    fn(file);
    file.flush();
    if (!file) throw Error(ErrorKind::IoError, fmt::format("failed writing '{}'", *path));
}

void print_components(const IdentityValue& v, std::ostream& out) {
    const auto& c = v.components;
    fmt::print(out, "z_alpha_x0={}\n", format_value(c.z_alpha_x0));
    fmt::print(out, "z_alpha_b={}\n", format_value(c.z_alpha_b));
    fmt::print(out, "w_x0={}\n", format_value(c.w_x0));
    fmt::print(out, "w_b={}\n", format_value(c.w_b));
    if (v.kind == PassageKind::Lower) fmt::print(out, "w_prime_b={}\n", format_value(c.w_prime_b));
    fmt::print(out, "phi_q={}\n", format_value(c.phi_q));
    fmt::print(out, "phi_alpha_minus_q={}\n", format_value(c.phi_alpha_minus_q));
}

} // namespace

std::string format_value(double v) {
    std::string s = fmt::format("{}", v);
    if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fluctuation identities of spectrally negative Levy processes reflected in [0, B]", "levyfluct"};
    app.require_subcommand(1);

    CommonFlags flags;
    bool derivative = false;

    auto* exponent = app.add_subcommand("exponent", "Laplace exponent phi(alpha)");
    add_common(exponent, flags);
    exponent->add_flag("--derivative", derivative, "print phi'(alpha) instead");

    auto* inverse = app.add_subcommand("phi-inverse", "right inverse Phi(q)");
    add_common(inverse, flags);

    double x_max = 5.0;
    std::size_t points = 51;
    auto* scale = app.add_subcommand("scale", "CSV sweep of W^(q), W^(q)' and Z^(q)");
    add_common(scale, flags);
    scale->add_option("--x-max", x_max, "largest x")->check(CLI::PositiveNumber);
    scale->add_option("--points", points, "number of grid points")->check(CLI::Range(2, 10'000'000));

    std::string kind;
    std::optional<double> lower_distance;
    bool components = false;
    auto* transform = app.add_subcommand("transform", "evaluate one identity");
    add_common(transform, flags);
    transform->add_option("kind", kind, "upper | lower | exit | exponent | rate")
        ->required()
        ->check(CLI::IsMember({"upper", "lower", "exit", "exponent", "rate"}));
    transform->add_option("--a", lower_distance, "distance to the lower level (exit)");
    transform->add_flag("--components", components, "also print the formula components");

    std::string mode;
    std::string stop_kind = "upper";
    std::optional<double> stop_level;
    auto* simulate = app.add_subcommand("simulate", "simulate one reflected path and dump it as CSV");
    add_common(simulate, flags);
    simulate->add_option("--mode", mode, "exact | euler")->check(CLI::IsMember({"exact", "euler"}));
    simulate->add_option("--stop", stop_kind, "upper | lower | time | local-time")
        ->check(CLI::IsMember({"upper", "lower", "time", "local-time"}));
    simulate->add_option("--stop-level", stop_level, "time or upper local time for --stop time|local-time");

    std::string suite = "default";
    auto* validate = app.add_subcommand("validate", "compare identities against Monte Carlo");
    add_common(validate, flags);
    validate->add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run 'levyfluct --help' for usage\n";
        return kExitUsage;
    }

    try {
        const RunConfig cfg = load(flags);
        const auto& spec = cfg.process;
        const auto& p = cfg.params;

        if (exponent->parsed()) {
            const double alpha = need(p.alpha, "alpha");
            double value = 0.0;
            if (derivative) {
                value = phi_prime(spec, alpha);
            } else {
                value = alpha >= 0.0 ? phi(spec, alpha) : phi_extended(spec, alpha);
            }
            out << format_value(value) << '\n';
            return kExitOk;
        }

        if (inverse->parsed()) {
            out << format_value(right_inverse(spec, need(p.q, "q"))) << '\n';
            return kExitOk;
        }

        if (scale->parsed()) {
            const double q = p.q.value_or(0.0);
            const auto ev = evaluator_for(cfg, q);
            const double alpha = p.alpha.value_or(ev.phi_q());
            with_output(p.output, out, [&](std::ostream& s) {
                s << "x,w_q,w_q_prime,z_q_alpha\n";
                for (std::size_t i = 0; i < points; ++i) {
                    const double x = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
                    const double wp = x > 0.0 ? ev.w_prime(x).value : std::nan("");
                    fmt::print(s, "{:.17g},{:.17g},{:.17g},{:.17g}\n", x, ev.w(x), wp, ev.z(alpha, x));
                }
            });
            return kExitOk;
        }

        if (transform->parsed()) {
            const double q = p.q.value_or(0.0);
            const auto ev = evaluator_for(cfg, q);
            if (kind == "exit") {
                out << format_value(two_sided_exit(ev, need(lower_distance, "a"), need(p.b, "b"))) << '\n';
                return kExitOk;
            }
            if (kind == "rate") {
                out << format_value(local_time_jump_rate(ev, need(p.b, "b"))) << '\n';
                return kExitOk;
            }
            if (kind == "exponent") {
                out << format_value(inverse_local_time_exponent(ev, q, need(p.alpha, "alpha"), need(p.b, "b"))) << '\n';
                return kExitOk;
            }
            const TransformQuery query{q, need(p.alpha, "alpha"), p.theta.value_or(0.0), need(p.x0, "x0"),
                                       need(p.b, "b")};
            const IdentityValue v =
                kind == "upper" ? upper_passage_transform(ev, query) : lower_passage_transform(ev, query);
            out << format_value(v.value) << '\n';
            if (components) print_components(v, out);
            return kExitOk;
        }

        if (simulate->parsed()) {
            const double b = need(p.b, "b");
            const double x0 = p.x0.value_or(b);
            const std::uint64_t seed = p.seed.value_or(1);
            const bool exact = mode.empty() ? spec.bounded_variation() : mode == "exact";
            StopCondition stop = StopCondition::first_upper_passage();
            if (stop_kind == "lower") {
                stop = StopCondition::first_lower_passage();
            } else if (stop_kind == "time") {
                stop = StopCondition::time(need(stop_level, "stop-level"));
            } else if (stop_kind == "local-time") {
                stop = StopCondition::upper_local_time(need(stop_level, "stop-level"));
            }
            const ReflectedPath path = exact ? simulate_event_exact(spec, x0, b, stop, seed)
                                             : simulate_euler(spec, x0, b, p.dt.value_or(1e-3), stop, seed);
            with_output(p.output, out, [&](std::ostream& s) { write_path_csv(path, s); });
            return kExitOk;
        }

        if (validate->parsed()) {
            SuiteOptions options;
            options.n_paths = static_cast<std::size_t>(p.n_paths.value_or(options.n_paths));
            options.seed = p.seed.value_or(options.seed);
            options.dt = p.dt;
            options.par = parallelism_from_env();
            const ValidationReport report = run_suite(spec, suite, options);
            if (p.output) {
                emit_report(report, *p.output);
                const auto failed = std::count_if(report.rows.begin(), report.rows.end(),
                                                  [](const ReportRow& r) { return !r.pass; });
                fmt::print(out, "{} rows, {} failed\n", report.rows.size(), failed);
            } else {
                emit_report(report, out);
            }
            return report.all_pass() ? kExitOk : kExitValidationFailed;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace levyfluct
