#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "levyfluct/levy_model.hpp"

namespace levyfluct {

enum class PathMode { EventExact, EulerGrid };

/// When a simulated path stops.
struct StopCondition {
    enum class Kind {
        FirstUpperPassage, ///< W reaches B (first time U > 0)
        FirstLowerPassage, ///< first time L > 0
        UpperLocalTimeReaches, ///< U >= level
        TimeReaches, ///< t >= level
        LevelReaches, ///< W >= level (one-sided reflection)
    };
    Kind kind;
    double level = 0.0;

    static StopCondition first_upper_passage() { return {Kind::FirstUpperPassage}; }
    static StopCondition first_lower_passage() { return {Kind::FirstLowerPassage}; }
    static StopCondition upper_local_time(double x) { return {Kind::UpperLocalTimeReaches, x}; }
    static StopCondition time(double t) { return {Kind::TimeReaches, t}; }
    static StopCondition level_reached(double k) { return {Kind::LevelReaches, k}; }
};

/// tau_0^U and tau_0^L with the local times at those instants. Times are
/// +inf when the passage did not happen before the path stopped.
struct PassageRecord {
    double tau_u0 = std::numeric_limits<double>::infinity();
    double l_at_tau_u0 = 0.0;
    double tau_l0 = std::numeric_limits<double>::infinity();
    /// Overshoot below 0; zero when the barrier is reached by creeping.
    double l_at_tau_l0 = 0.0;
    double u_at_tau_l0 = 0.0;

    [[nodiscard]] bool upper_reached() const noexcept { return tau_u0 != std::numeric_limits<double>::infinity(); }
    [[nodiscard]] bool lower_reached() const noexcept { return tau_l0 != std::numeric_limits<double>::infinity(); }
};

/// Solution (W, L, U) of the Skorokhod problem on [0, B], one row per
/// event (EventExact) or grid/jump epoch (EulerGrid). Row 0 is t = 0.
struct ReflectedPath {
    std::vector<double> times;
    std::vector<double> x_incr; ///< increment of X since the previous row (0 for row 0)
    std::vector<double> w;
    std::vector<double> l;
    std::vector<double> u;
    double b = std::numeric_limits<double>::infinity();
    double x0 = 0.0;
    PathMode mode = PathMode::EventExact;
    double dt = 0.0; ///< grid step, EulerGrid only
    PassageRecord passages;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    /// X(t_i) with X(0) = x0.
    [[nodiscard]] std::vector<double> x_values() const;
};

/// Sample mean with standard error over n replications.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    [[nodiscard]] static McEstimate from_samples(const std::vector<double>& samples);
};

/// Source of jump epochs and magnitudes for the event-driven kernel.
/// `next_interarrival` may return +inf (no more jumps).
struct JumpSchedule {
    std::function<double()> next_interarrival;
    std::function<double()> next_size;
};

/// Guard limits: a path exceeding either aborts with NonTermination.
inline constexpr std::uint64_t kMaxStepsPerPath = 100'000'000;
inline constexpr std::uint64_t kMaxJumpsPerPath = 1'000'000;

/// Piecewise-deterministic exact path for sigma2 = 0, drift > 0: W rises at
/// the drift, sits at B while U grows, and drops at jumps with the deficit
/// pushed into L. Throws UnsupportedSpec for sigma2 > 0.
[[nodiscard]] ReflectedPath simulate_event_exact(const ProcessSpec& spec, double x0, double b,
                                                 const StopCondition& stop, std::uint64_t seed,
                                                 std::uint64_t stream = 0);

/// Same kernel driven by an explicit jump schedule (no randomness).
[[nodiscard]] ReflectedPath simulate_event_exact(const ProcessSpec& spec, double x0, double b,
                                                 const StopCondition& stop, const JumpSchedule& jumps);

/// Euler scheme on a grid of width dt with jump epochs inserted exactly.
/// Reflection within a step is applied at 0 first, then at B.
[[nodiscard]] ReflectedPath simulate_euler(const ProcessSpec& spec, double x0, double b, double dt,
                                           const StopCondition& stop, std::uint64_t seed,
                                           std::uint64_t stream = 0);

/// Reflection at 0 only (B = inf): U = 0 and L(t) = -min(inf_{s<=t} X(s), 0)
/// with X(0) = x0. EventExact when `dt` is empty (requires sigma2 = 0).
[[nodiscard]] ReflectedPath one_sided_lower_reflection(const ProcessSpec& spec, double x0,
                                                       const StopCondition& stop, std::uint64_t seed,
                                                       std::optional<double> dt = std::nullopt,
                                                       std::uint64_t stream = 0);

/// Number of worker threads; 0 means hardware concurrency.
struct Parallelism {
    unsigned threads = 0;
};

enum class PassageSide { Upper, Lower };

/// Monte Carlo estimate of E_{x0} e^{-alpha L(tau_0^U) - q tau_0^U} (Upper) or
/// E_{x0} e^{-alpha L(tau_0^L) - theta U(tau_0^L) - q tau_0^L} (Lower).
/// EventExact when `dt` is empty. Bit-identical for any thread count.
[[nodiscard]] McEstimate estimate_passage_functional(const ProcessSpec& spec, double q, double alpha, double theta,
                                                     double x0, double b, PassageSide which, std::size_t n_paths,
                                                     std::uint64_t seed, std::optional<double> dt = std::nullopt,
                                                     Parallelism par = {});

/// Samples of x -> L(tau_x^U) started at x0 = B and run until U >= x_max.
struct InverseLocalTimeSample {
    double x_max = 0.0;
    McEstimate jump_rate;
    /// Increments L(tau_{k+1}^U) - L(tau_k^U), k = 0 .. floor(x_max) - 1, all paths.
    std::vector<double> unit_increments;

    /// Sample mean of e^{-alpha * increment}.
    [[nodiscard]] McEstimate increment_transform(double alpha) const;
};

[[nodiscard]] InverseLocalTimeSample estimate_inverse_local_time_process(
    const ProcessSpec& spec, double b, double x_max, std::size_t n_paths, std::uint64_t seed,
    std::optional<double> dt = std::nullopt, Parallelism par = {});

/// E e^{alpha inf_t X(t)}, X(0) = 0, alpha > 0, for a positive-mean spec. Each
/// path runs until the reflected process first reaches `level`; a later new
/// minimum then requires a drop larger than `level`.
[[nodiscard]] McEstimate estimate_minimum_transform(const ProcessSpec& spec, double alpha, std::size_t n_paths,
                                                    std::uint64_t seed, double level = 50.0,
                                                    std::optional<double> dt = std::nullopt, Parallelism par = {});

/// E e^{-alpha X(J) - theta J} for the compound Poisson process formed by the
/// spec's jump magnitudes (positive jumps of size xi at rate lambda_J); J is
/// its first jump epoch.
[[nodiscard]] McEstimate estimate_first_jump_transform(const ProcessSpec& spec, double alpha, double theta,
                                                       std::size_t n_paths, std::uint64_t seed);

/// CSV with header `t,x,w,l,u`, 17 significant digits.
void write_path_csv(const ReflectedPath& path, std::ostream& out);

} // namespace levyfluct
