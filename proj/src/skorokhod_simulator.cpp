#include "levyfluct/skorokhod_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "levyfluct/error.hpp"
#include "levyfluct/random.hpp"

namespace levyfluct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
    double t = 0.0;
    double dx = 0.0;
    double dl = 0.0;
    double du = 0.0;
    double w = 0.0;
    double l = 0.0;
    double u = 0.0;
    double jump = 0.0;
    bool creep = false;
};

class RandomJumps {
public:
    RandomJumps(const ProcessSpec& spec, StreamRng& rng) : spec_(spec), rng_(rng) {}

    double next_interarrival() { return spec_.has_jumps() ? rng_.exponential(spec_.jump_intensity()) : kInf; }

    double next_size() {
        const auto mix = spec_.jump_mixture();
        std::size_t i = 0;
        if (mix.size() > 1) {
            double u = rng_.uniform();
            while (i + 1 < mix.size() && u >= mix[i].weight) u -= mix[i++].weight;
        }
        return rng_.exponential(mix[i].rate);
    }

private:
    const ProcessSpec& spec_;
    StreamRng& rng_;
};

class ScheduledJumps {
public:
    explicit ScheduledJumps(const JumpSchedule& s) : s_(s) {}
    double next_interarrival() { return s_.next_interarrival ? s_.next_interarrival() : kInf; }
    double next_size() { return s_.next_size(); }

private:
    const JumpSchedule& s_;
};

void check_geometry(double x0, double b) {
    if (!(b > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("B must be positive, got {}", b));
    if (!(x0 >= 0.0 && x0 <= b) || !std::isfinite(x0)) {
        throw Error(ErrorKind::DomainError, fmt::format("x0 = {} outside [0, B = {}]", x0, b));
    }
}

bool stops_at_start(const ProcessSpec& spec, double x0, double b, const StopCondition& stop) {
    using K = StopCondition::Kind;
    switch (stop.kind) {
    case K::FirstUpperPassage: return x0 >= b;
    case K::FirstLowerPassage: return x0 == 0.0 && !spec.bounded_variation();
    case K::UpperLocalTimeReaches: return stop.level <= 0.0;
    case K::TimeReaches: return stop.level <= 0.0;
    case K::LevelReaches: return x0 >= stop.level;
    }
    return false;
}

bool stops_after(const Row& r, double b, const StopCondition& stop) {
    using K = StopCondition::Kind;
    switch (stop.kind) {
    case K::FirstUpperPassage: return r.w >= b;
    case K::FirstLowerPassage: return r.dl > 0.0;
    case K::UpperLocalTimeReaches: return r.u >= stop.level;
    case K::TimeReaches: return r.t >= stop.level;
    case K::LevelReaches: return r.w >= stop.level;
    }
    return false;
}

/// First passages seen along a stream of rows.
class PassageTracker {
public:
    PassageTracker(double b, bool creeps_down) : b_(b), creeps_down_(creeps_down) {}

    void on_row(const Row& r) {
        if (!rec_.upper_reached() && r.w >= b_) {
            rec_.tau_u0 = r.t;
            rec_.l_at_tau_u0 = r.l - r.dl;
        }
        if (!rec_.lower_reached()) {
            if (r.t == 0.0 && r.w == 0.0 && creeps_down_) {
                rec_.tau_l0 = 0.0;
            } else if (r.dl > 0.0) {
                rec_.tau_l0 = r.t;
                rec_.l_at_tau_l0 = r.creep ? 0.0 : r.l;
                rec_.u_at_tau_l0 = r.u;
            }
        }
    }

    [[nodiscard]] const PassageRecord& record() const noexcept { return rec_; }

private:
    double b_;
    bool creeps_down_;
    PassageRecord rec_;
};

class PathRecorder {
public:
    PathRecorder(ReflectedPath& path, bool creeps_down) : path_(path), tracker_(path.b, creeps_down) {}

    void on_row(const Row& r) {
        path_.times.push_back(r.t);
        path_.x_incr.push_back(r.dx);
        path_.w.push_back(r.w);
        path_.l.push_back(r.l);
        path_.u.push_back(r.u);
        tracker_.on_row(r);
    }

    void finish() { path_.passages = tracker_.record(); }

private:
    ReflectedPath& path_;
    PassageTracker tracker_;
};

template <class Jumps, class Visitor>
void run_event_exact(const ProcessSpec& spec, double x0, double b, const StopCondition& stop, Jumps& jumps,
                     Visitor& vis) {
    using K = StopCondition::Kind;
    const double c = spec.drift();
    Row r;
    r.w = x0;
    vis.on_row(r);
    if (stops_at_start(spec, x0, b, stop)) return;

    const bool level_stop = stop.kind == K::LevelReaches && stop.level < b;
    const double ceiling = level_stop ? stop.level : b;
    const double t_end = stop.kind == K::TimeReaches ? stop.level : kInf;
    auto emit = [&](double t, double dx, double dl, double du, double w, double y) {
        r.t = t;
        r.dx = dx;
        r.dl = dl;
        r.du = du;
        r.w = w;
        r.l += dl;
        r.u += du;
        r.jump = y;
        r.creep = false;
        vis.on_row(r);
    };

    double next_jump = jumps.next_interarrival();
    std::uint64_t n_jumps = 0;
    for (;;) {
        const double horizon = std::min(next_jump, t_end);
        if (r.w < ceiling && ceiling < kInf) {
            const double hit = r.t + (ceiling - r.w) / c;
            if (hit <= horizon) {
                emit(hit, ceiling - r.w, 0.0, 0.0, ceiling, 0.0);
                if (stop.kind == K::FirstUpperPassage || level_stop) return;
                continue;
            }
        }
        const bool pinned = r.w >= ceiling;
        if (pinned && stop.kind == K::UpperLocalTimeReaches) {
            // Pinned at B, U grows at the drift rate.
            const double need = stop.level - r.u;
            const double t_stop = r.t + need / c;
            if (t_stop <= horizon) {
                r.t = t_stop;
                r.dx = need;
                r.dl = 0.0;
                r.du = need;
                r.u = stop.level;
                r.jump = 0.0;
                vis.on_row(r);
                return;
            }
        }
        if (horizon == kInf) {
            throw Error(ErrorKind::NonTermination, "no further jumps and the stop condition is unreachable");
        }
        const double dx = c * (horizon - r.t);
        double du = 0.0;
        double w = r.w + dx;
        if (pinned) {
            // No overshoot at B: all drift goes into U.
            du = dx;
            w = b;
        }
        if (t_end < next_jump) {
            emit(t_end, dx, 0.0, du, w, 0.0);
            return;
        }
        const double y = jumps.next_size();
        const double pre = w - y;
        const double dl = std::max(0.0, -pre);
        emit(next_jump, dx - y, dl, du, dl > 0.0 ? 0.0 : pre, y);
        if (stops_after(r, b, stop)) return;
        if (++n_jumps > kMaxJumpsPerPath) {
            throw Error(ErrorKind::NonTermination, fmt::format("path exceeded {} jumps", kMaxJumpsPerPath));
        }
        next_jump = r.t + jumps.next_interarrival();
    }
}

template <class Jumps, class Visitor>
void run_euler(const ProcessSpec& spec, double x0, double b, double dt, const StopCondition& stop, Jumps& jumps,
               StreamRng& rng, Visitor& vis) {
    using K = StopCondition::Kind;
    Row r;
    r.w = x0;
    vis.on_row(r);
    if (stops_at_start(spec, x0, b, stop)) return;

    const double c = spec.drift();
    const double sigma = std::sqrt(spec.gaussian_sq());
    const double sigma_grid = sigma * std::sqrt(dt);
    const double t_end = stop.kind == K::TimeReaches ? stop.level : kInf;

    double next_jump = jumps.next_interarrival();
    std::uint64_t grid = 0;
    std::uint64_t steps = 0;
    std::uint64_t n_jumps = 0;
    for (;;) {
        const double grid_next = std::min(static_cast<double>(grid + 1) * dt, t_end);
        const bool jump_now = next_jump <= grid_next;
        const double t_next = jump_now ? next_jump : grid_next;
        const double h = t_next - r.t;

        double diffusion = c * h;
        if (sigma > 0.0) {
            const double scale = (!jump_now && h == dt) ? sigma_grid : sigma * std::sqrt(h);
            diffusion += scale * rng.normal();
        }
        double y = 0.0;
        if (jump_now) {
            y = jumps.next_size();
            next_jump += jumps.next_interarrival();
            if (++n_jumps > kMaxJumpsPerPath) {
                throw Error(ErrorKind::NonTermination, fmt::format("path exceeded {} jumps", kMaxJumpsPerPath));
            }
        }
        const double incr = diffusion - y;
        const double pre = r.w + incr;
        const double dl = std::max(0.0, -pre);
        const double du = std::max(0.0, pre + dl - b);

        r.creep = dl > 0.0 && r.w + diffusion < 0.0;
        r.t = t_next;
        r.dx = incr;
        r.dl = dl;
        r.du = du;
        r.w = du > 0.0 ? b : (dl > 0.0 ? 0.0 : pre);
        r.l += dl;
        r.u += du;
        r.jump = y;
        if (t_next == grid_next) ++grid;
        vis.on_row(r);

        if (stops_after(r, b, stop)) return;
        if (++steps > kMaxStepsPerPath) {
            throw Error(ErrorKind::NonTermination, fmt::format("path exceeded {} steps", kMaxStepsPerPath));
        }
    }
}

ReflectedPath new_path(double x0, double b, PathMode mode, double dt) {
    ReflectedPath path;
    path.b = b;
    path.x0 = x0;
    path.mode = mode;
    path.dt = dt;
    return path;
}

void require_event_exact(const ProcessSpec& spec) {
    if (!spec.bounded_variation()) {
        throw Error(ErrorKind::UnsupportedSpec, "exact simulation needs sigma2 = 0");
    }
}

void require_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::DomainError, fmt::format("dt must be > 0, got {}", dt));
}

unsigned worker_count(Parallelism par, std::size_t n) {
    unsigned t = par.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : par.threads;
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(n, 1)));
}

/// Runs fn(i) for i in [0, n) on a fixed pool; results land at index i so
/// the caller can reduce in path order.
template <class T, class Fn>
std::vector<T> run_replications(std::size_t n, Parallelism par, Fn fn) {
    std::vector<T> out(n);
    const unsigned workers = worker_count(par, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

void require_paths(std::size_t n) {
    if (n < 2) throw Error(ErrorKind::DomainError, fmt::format("need at least 2 paths, got {}", n));
}

} // namespace

std::vector<double> ReflectedPath::x_values() const {
    std::vector<double> x(x_incr.size());
    double acc = x0;
    for (std::size_t i = 0; i < x_incr.size(); ++i) {
        acc += x_incr[i];
        x[i] = acc;
    }
    return x;
}

McEstimate McEstimate::from_samples(const std::vector<double>& samples) {
    McEstimate est;
    est.n = samples.size();
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double v : samples) sum += v;
    est.mean = sum / static_cast<double>(est.n);
    if (est.n < 2) return est;
    double ss = 0.0;
    for (double v : samples) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
    return est;
}

ReflectedPath simulate_event_exact(const ProcessSpec& spec, double x0, double b, const StopCondition& stop,
                                   std::uint64_t seed, std::uint64_t stream) {
    require_event_exact(spec);
    check_geometry(x0, b);
    StreamRng rng(seed, stream);
    RandomJumps jumps(spec, rng);
    auto path = new_path(x0, b, PathMode::EventExact, 0.0);
    PathRecorder rec(path, false);
    run_event_exact(spec, x0, b, stop, jumps, rec);
    rec.finish();
    return path;
}

ReflectedPath simulate_event_exact(const ProcessSpec& spec, double x0, double b, const StopCondition& stop,
                                   const JumpSchedule& schedule) {
    require_event_exact(spec);
    check_geometry(x0, b);
    ScheduledJumps jumps(schedule);
    auto path = new_path(x0, b, PathMode::EventExact, 0.0);
    PathRecorder rec(path, false);
    run_event_exact(spec, x0, b, stop, jumps, rec);
    rec.finish();
    return path;
}

ReflectedPath simulate_euler(const ProcessSpec& spec, double x0, double b, double dt, const StopCondition& stop,
                             std::uint64_t seed, std::uint64_t stream) {
    check_geometry(x0, b);
    require_dt(dt);
    StreamRng rng(seed, stream);
    RandomJumps jumps(spec, rng);
    auto path = new_path(x0, b, PathMode::EulerGrid, dt);
    PathRecorder rec(path, !spec.bounded_variation());
    run_euler(spec, x0, b, dt, stop, jumps, rng, rec);
    rec.finish();
    return path;
}

ReflectedPath one_sided_lower_reflection(const ProcessSpec& spec, double x0, const StopCondition& stop,
                                         std::uint64_t seed, std::optional<double> dt, std::uint64_t stream) {
    using K = StopCondition::Kind;
    if (stop.kind != K::TimeReaches && stop.kind != K::LevelReaches && stop.kind != K::FirstLowerPassage) {
        throw Error(ErrorKind::DomainError, "one-sided reflection needs a time, level or lower-passage stop");
    }
    if (!(x0 >= 0.0) || !std::isfinite(x0)) throw Error(ErrorKind::DomainError, fmt::format("x0 must be >= 0, got {}", x0));
    StreamRng rng(seed, stream);
    RandomJumps jumps(spec, rng);
    if (!dt) {
        require_event_exact(spec);
        auto path = new_path(x0, kInf, PathMode::EventExact, 0.0);
        PathRecorder rec(path, false);
        run_event_exact(spec, x0, kInf, stop, jumps, rec);
        rec.finish();
        return path;
    }
    require_dt(*dt);
    auto path = new_path(x0, kInf, PathMode::EulerGrid, *dt);
    PathRecorder rec(path, !spec.bounded_variation());
    run_euler(spec, x0, kInf, *dt, stop, jumps, rng, rec);
    rec.finish();
    return path;
}

McEstimate estimate_passage_functional(const ProcessSpec& spec, double q, double alpha, double theta, double x0,
                                       double b, PassageSide which, std::size_t n_paths, std::uint64_t seed,
                                       std::optional<double> dt, Parallelism par) {
    check_geometry(x0, b);
    require_paths(n_paths);
    if (!(q >= 0.0) || !(alpha >= 0.0) || !(theta >= 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("need q, alpha, theta >= 0 (q={}, alpha={}, theta={})", q, alpha, theta));
    }
    if (!dt) require_event_exact(spec); else require_dt(*dt);
    const auto stop = which == PassageSide::Upper ? StopCondition::first_upper_passage()
                                                  : StopCondition::first_lower_passage();
    const bool creeps = !spec.bounded_variation();

    auto values = run_replications<double>(n_paths, par, [&](std::size_t i) {
        StreamRng rng(seed, i);
        RandomJumps jumps(spec, rng);
        PassageTracker tracker(b, creeps);
        if (dt) run_euler(spec, x0, b, *dt, stop, jumps, rng, tracker);
        else run_event_exact(spec, x0, b, stop, jumps, tracker);
        const auto& rec = tracker.record();
        if (which == PassageSide::Upper) return std::exp(-alpha * rec.l_at_tau_u0 - q * rec.tau_u0);
        return std::exp(-alpha * rec.l_at_tau_l0 - theta * rec.u_at_tau_l0 - q * rec.tau_l0);
    });
    return McEstimate::from_samples(values);
}

namespace {

class LocalTimeLevels {
public:
    explicit LocalTimeLevels(double x_max)
        : levels_(static_cast<std::size_t>(std::floor(x_max + 1e-12)) + 1, std::numeric_limits<double>::quiet_NaN()) {}

    void on_row(const Row& r) {
        // Within one row U moves before L (event rows: accrual at B, then the jump).
        if (r.du > 0.0) {
            if (pending_ && r.u - r.du > 0.0) ++jumps_;
            pending_ = false;
        }
        const double l_before = r.l - r.dl;
        while (next_ < levels_.size() &&
               (next_ == 0 ? r.u > 0.0 : r.u >= static_cast<double>(next_))) {
            levels_[next_++] = l_before;
        }
        if (r.dl > 0.0) pending_ = true;
    }

    [[nodiscard]] std::size_t jumps() const noexcept { return jumps_; }
    [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }

private:
    std::vector<double> levels_;
    std::size_t next_ = 0;
    std::size_t jumps_ = 0;
    bool pending_ = false;
};

struct LocalTimePathResult {
    double rate = 0.0;
    std::vector<double> increments;
};

} // namespace

McEstimate InverseLocalTimeSample::increment_transform(double alpha) const {
    std::vector<double> values(unit_increments.size());
    std::transform(unit_increments.begin(), unit_increments.end(), values.begin(),
                   [alpha](double d) { return std::exp(-alpha * d); });
    return McEstimate::from_samples(values);
}

InverseLocalTimeSample estimate_inverse_local_time_process(const ProcessSpec& spec, double b, double x_max,
                                                           std::size_t n_paths, std::uint64_t seed,
                                                           std::optional<double> dt, Parallelism par) {
    check_geometry(b, b);
    require_paths(n_paths);
    if (!(x_max > 0.0) || !std::isfinite(x_max)) {
        throw Error(ErrorKind::DomainError, fmt::format("x_max must be positive, got {}", x_max));
    }
    if (!dt) require_event_exact(spec); else require_dt(*dt);
    const auto stop = StopCondition::upper_local_time(x_max);

    auto results = run_replications<LocalTimePathResult>(n_paths, par, [&](std::size_t i) {
        StreamRng rng(seed, i);
        RandomJumps jumps(spec, rng);
        LocalTimeLevels levels(x_max);
        if (dt) run_euler(spec, b, b, *dt, stop, jumps, rng, levels);
        else run_event_exact(spec, b, b, stop, jumps, levels);
        LocalTimePathResult res;
        res.rate = static_cast<double>(levels.jumps()) / x_max;
        const auto& lv = levels.levels();
        for (std::size_t k = 0; k + 1 < lv.size(); ++k) res.increments.push_back(lv[k + 1] - lv[k]);
        return res;
    });

    InverseLocalTimeSample sample;
    sample.x_max = x_max;
    std::vector<double> rates;
    rates.reserve(results.size());
    for (auto& r : results) {
        rates.push_back(r.rate);
        sample.unit_increments.insert(sample.unit_increments.end(), r.increments.begin(), r.increments.end());
    }
    sample.jump_rate = McEstimate::from_samples(rates);
    return sample;
}

McEstimate estimate_minimum_transform(const ProcessSpec& spec, double alpha, std::size_t n_paths, std::uint64_t seed,
                                      double level, std::optional<double> dt, Parallelism par) {
    require_paths(n_paths);
    if (!(spec.mean() > 0.0)) throw Error(ErrorKind::DomainError, "all-time minimum needs a positive mean");
    if (!(alpha > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("alpha must be > 0, got {}", alpha));
    if (!(level > 0.0)) throw Error(ErrorKind::DomainError, fmt::format("level must be > 0, got {}", level));
    if (!dt) require_event_exact(spec); else require_dt(*dt);
    const auto stop = StopCondition::level_reached(level);

    struct FinalLocalTime {
        double l = 0.0;
        void on_row(const Row& r) { l = r.l; }
    };
    auto values = run_replications<double>(n_paths, par, [&](std::size_t i) {
        StreamRng rng(seed, i);
        RandomJumps jumps(spec, rng);
        FinalLocalTime fin;
        if (dt) run_euler(spec, 0.0, kInf, *dt, stop, jumps, rng, fin);
        else run_event_exact(spec, 0.0, kInf, stop, jumps, fin);
        // inf X = -L at the end of the path.
        return std::exp(-alpha * fin.l);
    });
    return McEstimate::from_samples(values);
}

McEstimate estimate_first_jump_transform(const ProcessSpec& spec, double alpha, double theta, std::size_t n_paths,
                                         std::uint64_t seed) {
    require_paths(n_paths);
    if (!spec.has_jumps()) throw Error(ErrorKind::DomainError, "first-jump transform needs a jump component");
    if (!(alpha >= 0.0) || !(theta >= 0.0)) {
        throw Error(ErrorKind::DomainError, fmt::format("need alpha, theta >= 0 (alpha={}, theta={})", alpha, theta));
    }
    std::vector<double> values(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        StreamRng rng(seed, i);
        RandomJumps jumps(spec, rng);
        const double epoch = jumps.next_interarrival();
        const double size = jumps.next_size();
        values[i] = std::exp(-alpha * size - theta * epoch);
    }
    return McEstimate::from_samples(values);
}

void write_path_csv(const ReflectedPath& path, std::ostream& out) {
    out << "t,x,w,l,u\n";
    const auto x = path.x_values();
    for (std::size_t i = 0; i < path.size(); ++i) {
        fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", path.times[i], x[i], path.w[i], path.l[i],
                   path.u[i]);
    }
}

} // namespace levyfluct
