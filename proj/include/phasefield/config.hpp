#pragma once

#include "phasefield/experiment.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phasefield {

/// Flat key-value configuration.
///
///     # comment
///     [scheme]
///     kind = "semi_implicit"
///     dt = auto
///     potential.gamma = [-1, 1]      # dotted keys work inside or outside sections
///
/// Values are numbers, quoted strings, bare words or bracketed lists of
/// numbers. Keys outside the known set are rejected.
class ConfigFile {
public:
    struct Entry {
        std::string raw;
        int line = 0;  // 0 for overrides
    };

    static ConfigFile parse(std::string_view text, std::string source = "<string>");
    static ConfigFile load(const std::filesystem::path& path);

    /// Applies "key=value". A bare key resolves to the unique known key with
    /// that last component (for example "dt" -> "scheme.dt").
    void apply_override(std::string_view assignment);

    bool has(std::string_view key) const;
    std::optional<std::string> get_string(std::string_view key) const;
    std::optional<double> get_real(std::string_view key) const;
    std::optional<std::int64_t> get_integer(std::string_view key) const;
    /// Accepts a bracketed list or a single number.
    std::optional<std::vector<double>> get_list(std::string_view key) const;

    const std::string& source() const noexcept { return source_; }

    static std::span<const std::string_view> known_keys();

private:
    void set(std::string key, std::string raw, int line);
    [[noreturn]] void fail(std::string_view key, const std::string& what) const;

    std::string source_;
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Potential section only; the rest of the file may be incomplete.
PotentialSpec parse_potential_config(const ConfigFile& file);

RunConfig parse_run_config(const ConfigFile& file);
SweepConfig parse_sweep_config(const ConfigFile& file);

struct ConvergenceConfig {
    RunConfig base;
    std::vector<Resolution> ladder;
    RunConfig reference;
};

ConvergenceConfig parse_convergence_config(const ConfigFile& file);

}  // namespace phasefield
