#include "levyfluct/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "levyfluct/error.hpp"

namespace levyfluct {

namespace {

std::optional<double> read_number(const nlohmann::json& run, const char* key) {
    if (!run.contains(key)) return std::nullopt;
    const auto& v = run.at(key);
    if (!v.is_number()) throw Error(ErrorKind::InvalidValue, fmt::format("run.{} must be a number", key));
    return v.get<double>();
}

std::optional<std::uint64_t> read_count(const nlohmann::json& run, const char* key) {
    if (!run.contains(key)) return std::nullopt;
    const auto& v = run.at(key);
    if (!v.is_number_unsigned()) {
        throw Error(ErrorKind::InvalidValue, fmt::format("run.{} must be a non-negative integer", key));
    }
    return v.get<std::uint64_t>();
}

std::optional<std::string> read_string(const nlohmann::json& run, const char* key) {
    if (!run.contains(key)) return std::nullopt;
    const auto& v = run.at(key);
    if (!v.is_string()) throw Error(ErrorKind::InvalidValue, fmt::format("run.{} must be a string", key));
    return v.get<std::string>();
}

void require(bool ok, const char* key, double value, const char* rule) {
    if (!ok) throw Error(ErrorKind::InvalidValue, fmt::format("run.{} = {} must be {}", key, value, rule));
}

RunParameters parse_run(const nlohmann::json& run) {
    if (!run.is_object()) throw Error(ErrorKind::InvalidValue, "run must be an object");
    static constexpr const char* kKeys[] = {"q", "alpha", "theta", "x0", "b", "dt", "backend", "n_paths", "seed", "output"};
    for (const auto& [key, _] : run.items()) {
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
            throw Error(ErrorKind::UnknownKey, fmt::format("unknown key 'run.{}'", key));
        }
    }
    RunParameters p;
    p.q = read_number(run, "q");
    p.alpha = read_number(run, "alpha");
    p.theta = read_number(run, "theta");
    p.x0 = read_number(run, "x0");
    p.b = read_number(run, "b");
    p.dt = read_number(run, "dt");
    p.backend = read_string(run, "backend");
    p.n_paths = read_count(run, "n_paths");
    p.seed = read_count(run, "seed");
    p.output = read_string(run, "output");

    if (p.q) require(*p.q >= 0.0, "q", *p.q, ">= 0");
    if (p.theta) require(*p.theta >= 0.0, "theta", *p.theta, ">= 0");
    if (p.x0) require(*p.x0 >= 0.0, "x0", *p.x0, ">= 0");
    if (p.b) require(*p.b > 0.0, "b", *p.b, "> 0");
    if (p.dt) require(*p.dt > 0.0, "dt", *p.dt, "> 0");
    if (p.n_paths) require(*p.n_paths >= 2, "n_paths", static_cast<double>(*p.n_paths), ">= 2");
    if (p.backend && *p.backend != "closed" && *p.backend != "numeric") {
        throw Error(ErrorKind::InvalidValue, fmt::format("run.backend must be 'closed' or 'numeric', got '{}'", *p.backend));
    }
    return p;
}

} // namespace

RunConfig parse_config(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
    RunParameters params;
    if (j.contains("run")) {
        params = parse_run(j.at("run"));
        j.erase("run");
    }
    return RunConfig{spec_from_json(j), std::move(params)};
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open config '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

nlohmann::json config_to_json(const RunConfig& config) {
    nlohmann::json j = spec_to_json(config.process);
    nlohmann::json run = nlohmann::json::object();
    const auto& p = config.params;
    if (p.q) run["q"] = *p.q;
    if (p.alpha) run["alpha"] = *p.alpha;
    if (p.theta) run["theta"] = *p.theta;
    if (p.x0) run["x0"] = *p.x0;
    if (p.b) run["b"] = *p.b;
    if (p.dt) run["dt"] = *p.dt;
    if (p.backend) run["backend"] = *p.backend;
    if (p.n_paths) run["n_paths"] = *p.n_paths;
    if (p.seed) run["seed"] = *p.seed;
    if (p.output) run["output"] = *p.output;
    if (!run.empty()) j["run"] = run;
    return j;
}

std::string emit_config(const RunConfig& config) { return config_to_json(config).dump(2); }

} // namespace levyfluct
