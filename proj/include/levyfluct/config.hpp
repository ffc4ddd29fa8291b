#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "levyfluct/levy_model.hpp"

namespace levyfluct {

/// Command parameters that may be stored next to the process in a config
/// file. Command-line flags override them.
struct RunParameters {
    std::optional<double> q;
    std::optional<double> alpha;
    std::optional<double> theta;
    std::optional<double> x0;
    std::optional<double> b;
    std::optional<double> dt;
    std::optional<std::string> backend; ///< "closed" or "numeric"
    std::optional<std::uint64_t> n_paths;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;

    friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

/// Config file: the process object of levy_model plus an optional "run"
/// object with RunParameters. Unknown keys anywhere are an error.
struct RunConfig {
    ProcessSpec process;
    RunParameters params;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig parse_config_file(const std::string& path);
[[nodiscard]] nlohmann::json config_to_json(const RunConfig& config);
[[nodiscard]] std::string emit_config(const RunConfig& config);

} // namespace levyfluct
