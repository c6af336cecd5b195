#pragma once

#include <bpcross/engine.hpp>
#include <bpcross/law.hpp>

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bpcross::cli
{

/// A config problem, tagged with the offending field.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field)
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline constexpr int default_order_cap = 20;
inline constexpr int default_population_cap = 40;
inline constexpr std::uint64_t default_replicates = 10'000;

/// One schema shared by every subcommand. Unknown fields are rejected.
struct Config
{
    std::map<int, double> law;
    std::vector<int> crossing_set{0};
    std::optional<double> t;
    std::vector<double> t_grid;
    int i0 = 1;
    int K = default_order_cap;
    int Jmax = default_population_cap;
    bool jmax_given = false;
    std::optional<std::vector<double>> v;
    std::uint64_t seed = 0;
    std::uint64_t reps = default_replicates;
    std::optional<double> horizon;
    OdeSettings ode;
    std::optional<std::string> output;

    /// t_grid if given, else {t} if given, else empty.
    std::vector<double> times() const;
};

Config parse_config(const nlohmann::json& doc);
Config load_config(const std::string& path);

} // namespace bpcross::cli
