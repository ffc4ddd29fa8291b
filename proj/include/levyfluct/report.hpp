#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levyfluct/levy_model.hpp"
#include "levyfluct/skorokhod_simulator.hpp"

namespace levyfluct {

/// One analytic value against its simulated counterpart.
struct ReportRow {
    std::string identity;
    double q = 0.0;
    double alpha = 0.0;
    double theta = 0.0;
    double x0 = 0.0;
    double b = 0.0;
    double analytic = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<ReportRow> rows;

    [[nodiscard]] bool all_pass() const;
};

/// z = (mc_mean - analytic) / mc_se, pass iff |z| <= 3. A zero standard
/// error gives z = 0 on exact agreement and +-inf otherwise.
[[nodiscard]] ReportRow make_row(std::string identity, double q, double alpha, double theta, double x0, double b,
                                 double analytic, const McEstimate& mc);

/// Header `identity,q,alpha,theta,x0,b,analytic,mc_mean,mc_se,z,pass`.
void emit_report(const ValidationReport& report, std::ostream& out);
/// Throws IoError when the file cannot be written.
void emit_report(const ValidationReport& report, const std::string& path);
[[nodiscard]] ValidationReport parse_report(std::istream& in);

struct SuiteOptions {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    /// Euler step; required when the process has a Gaussian part.
    std::optional<double> dt;
    Parallelism par;
};

/// Names accepted by run_suite.
[[nodiscard]] std::vector<std::string> suite_names();

/// Runs every identity of the named suite that applies to `spec` (the
/// Pollaczek-Khinchine row needs a positive mean, the first-jump row needs
/// jumps). Rows come out in a fixed order.
[[nodiscard]] ValidationReport run_suite(const ProcessSpec& spec, const std::string& suite, const SuiteOptions& options);

} // namespace levyfluct
