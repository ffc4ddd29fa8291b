#include "levyfluct/report.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "levyfluct/error.hpp"
#include "levyfluct/fluctuation_identities.hpp"
#include "levyfluct/random.hpp"
#include "levyfluct/scale_functions.hpp"

namespace levyfluct {

namespace {

constexpr const char* kHeader = "identity,q,alpha,theta,x0,b,analytic,mc_mean,mc_se,z,pass";

double parse_double(const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, fmt::format("bad number '{}' in report", field));
    }
}

} // namespace

bool ValidationReport::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

ReportRow make_row(std::string identity, double q, double alpha, double theta, double x0, double b, double analytic,
                   const McEstimate& mc) {
    ReportRow row{std::move(identity), q, alpha, theta, x0, b, analytic, mc.mean, mc.std_error, 0.0, false};
    const double diff = mc.mean - analytic;
    if (mc.std_error > 0.0) {
        row.z = diff / mc.std_error;
    } else if (diff != 0.0) {
        row.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    row.pass = std::abs(row.z) <= 3.0;
    return row;
}

void emit_report(const ValidationReport& report, std::ostream& out) {
    out << kHeader << '\n';
    for (const auto& r : report.rows) {
        fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                   r.identity, r.q, r.alpha, r.theta, r.x0, r.b, r.analytic, r.mc_mean, r.mc_se, r.z,
                   r.pass ? "true" : "false");
    }
}

void emit_report(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write report '{}'", path));
    emit_report(report, out);
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, fmt::format("failed writing report '{}'", path));
}

ValidationReport parse_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw Error(ErrorKind::ParseError, "missing report header");
    ValidationReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 11) throw Error(ErrorKind::ParseError, fmt::format("expected 11 fields: '{}'", line));
        ReportRow r;
        r.identity = fields[0];
        r.q = parse_double(fields[1]);
        r.alpha = parse_double(fields[2]);
        r.theta = parse_double(fields[3]);
        r.x0 = parse_double(fields[4]);
        r.b = parse_double(fields[5]);
        r.analytic = parse_double(fields[6]);
        r.mc_mean = parse_double(fields[7]);
        r.mc_se = parse_double(fields[8]);
        r.z = parse_double(fields[9]);
        if (fields[10] != "true" && fields[10] != "false") {
            throw Error(ErrorKind::ParseError, fmt::format("bad pass flag '{}'", fields[10]));
        }
        r.pass = fields[10] == "true";
        report.rows.push_back(std::move(r));
    }
    return report;
}

std::vector<std::string> suite_names() { return {"default"}; }

ValidationReport run_suite(const ProcessSpec& spec, const std::string& suite, const SuiteOptions& options) {
    if (suite != "default") throw Error(ErrorKind::InvalidValue, fmt::format("unknown suite '{}'", suite));
    if (options.n_paths < 2) throw Error(ErrorKind::InvalidValue, "suite needs at least 2 paths");

    std::optional<double> dt = options.dt;
    if (!spec.bounded_variation() && !dt) dt = 1e-3;
    const double b = 2.0;
    const double x0 = 1.0;
    const double theta = 0.3;
    const std::size_t n = options.n_paths;
    // Each row draws from its own seed so rows stay independent.
    std::uint64_t row_seed = options.seed;
    auto next_seed = [&] { return splitmix64(row_seed); };

    ValidationReport report;
    for (const double q : {0.1, 0.0}) {
        const auto ev = make_evaluator_preferring_closed_form(spec, q);
        const double alpha = ev.phi_q() + 0.5;
        const TransformQuery query{q, alpha, theta, x0, b};
        const double upper = upper_passage_transform(ev, query).value;
        report.rows.push_back(make_row("upper_passage", q, alpha, 0.0, x0, b, upper,
                                       estimate_passage_functional(spec, q, alpha, 0.0, x0, b, PassageSide::Upper, n,
                                                                   next_seed(), dt, options.par)));
        const double lower = lower_passage_transform(ev, query).value;
        report.rows.push_back(make_row("lower_passage", q, alpha, theta, x0, b, lower,
                                       estimate_passage_functional(spec, q, alpha, theta, x0, b, PassageSide::Lower, n,
                                                                   next_seed(), dt, options.par)));
    }
    {
        const double q = 0.1;
        const auto ev = make_evaluator_preferring_closed_form(spec, q);
        const TransformQuery query{q, ev.phi_q(), 0.0, x0, b};
        report.rows.push_back(make_row("lower_passage", q, ev.phi_q(), 0.0, x0, b,
                                       lower_passage_transform(ev, query).value,
                                       estimate_passage_functional(spec, q, ev.phi_q(), 0.0, x0, b, PassageSide::Lower,
                                                                   n, next_seed(), dt, options.par)));
    }
    {
        const auto ev = make_evaluator_preferring_closed_form(spec, 0.0);
        const std::size_t n_local = std::max<std::size_t>(2, n / 500);
        const double x_max = 50.0;
        const auto sample = estimate_inverse_local_time_process(spec, b, x_max, n_local, next_seed(), dt, options.par);
        report.rows.push_back(make_row("local_time_jump_rate", 0.0, 0.0, 0.0, b, b, local_time_jump_rate(ev, b),
                                       sample.jump_rate));
        const double alpha = ev.phi_q() + 1.0;
        report.rows.push_back(make_row("inverse_local_time_transform", 0.0, alpha, 0.0, b, b,
                                       std::exp(inverse_local_time_exponent(ev, 0.0, alpha, b)),
                                       sample.increment_transform(alpha)));
    }
    if (spec.mean() > 0.0) {
        const double alpha = 1.0;
        report.rows.push_back(make_row("minimum_transform", 0.0, alpha, 0.0, 0.0, 0.0, minimum_transform(spec, alpha),
                                       estimate_minimum_transform(spec, alpha, n, next_seed(), 50.0, dt, options.par)));
    }
    if (spec.has_jumps()) {
        const double alpha = 1.0;
        const double th = 0.5;
        const auto jt = [&](double a) { return jump_magnitude_transform(spec, a); };
        report.rows.push_back(make_row("first_jump", 0.0, alpha, th, 0.0, 0.0,
                                       first_jump_transform(spec.jump_intensity(), jt, alpha, th),
                                       estimate_first_jump_transform(spec, alpha, th, n, next_seed())));
    }
    return report;
}

} // namespace levyfluct
