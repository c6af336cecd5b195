#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bpcross::cli
{

namespace
{

const std::set<std::string> known_fields = {"law", "crossing_set", "t", "t_grid", "i0", "K", "Jmax", "v",
                                            "seed", "reps", "horizon", "ode", "output"};

double number(const nlohmann::json& value, const std::string& field)
{
    if (!value.is_number())
        throw ConfigError(field, "expected a number");
    const double x = value.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(field, "expected a finite number");
    return x;
}

double nonnegative(const nlohmann::json& value, const std::string& field)
{
    const double x = number(value, field);
    if (x < 0.0)
        throw ConfigError(field, "must be >= 0");
    return x;
}

int small_count(const nlohmann::json& value, const std::string& field)
{
    if (!value.is_number_integer())
        throw ConfigError(field, "expected an integer");
    const auto x = value.get<std::int64_t>();
    if (x < 0 || x > 1'000'000)
        throw ConfigError(field, "must be an integer in [0, 1000000]");
    return static_cast<int>(x);
}

std::uint64_t unsigned64(const nlohmann::json& value, const std::string& field)
{
    if (value.is_number_unsigned())
        return value.get<std::uint64_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    throw ConfigError(field, "expected a nonnegative integer");
}

} // namespace

std::vector<double> Config::times() const
{
    if (!t_grid.empty())
        return t_grid;
    if (t)
        return {*t};
    return {};
}

Config parse_config(const nlohmann::json& doc)
{
    if (!doc.is_object())
        throw ConfigError("config", "expected a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!known_fields.contains(key))
            throw ConfigError(key, "unknown field");

    Config cfg;
    if (!doc.contains("law"))
        throw ConfigError("law", "required field is missing");
    const auto& law = doc.at("law");
    if (!law.is_object() || law.empty())
        throw ConfigError("law", "expected a non-empty object of \"j\": rate");
    for (const auto& [key, value] : law.items())
    {
        const std::string field = "law." + key;
        std::size_t used = 0;
        int j = 0;
        try
        {
            j = std::stoi(key, &used);
        }
        catch (const std::exception&)
        {
            throw ConfigError(field, "offspring size must be an integer");
        }
        if (used != key.size() || j < 0)
            throw ConfigError(field, "offspring size must be a nonnegative integer");
        if (j == 1)
            throw ConfigError(field, "offspring size 1 is not an event");
        cfg.law[j] = nonnegative(value, field);
    }

    if (doc.contains("crossing_set"))
    {
        const auto& cs = doc.at("crossing_set");
        if (!cs.is_array())
            throw ConfigError("crossing_set", "expected an array of offspring sizes");
        cfg.crossing_set.clear();
        for (const auto& m : cs)
            cfg.crossing_set.push_back(small_count(m, "crossing_set"));
    }
    if (doc.contains("t"))
        cfg.t = nonnegative(doc.at("t"), "t");
    if (doc.contains("t_grid"))
    {
        const auto& grid = doc.at("t_grid");
        if (!grid.is_array() || grid.empty())
            throw ConfigError("t_grid", "expected a non-empty array of times");
        for (const auto& x : grid)
            cfg.t_grid.push_back(nonnegative(x, "t_grid"));
    }
    if (doc.contains("i0"))
        cfg.i0 = small_count(doc.at("i0"), "i0");
    if (doc.contains("K"))
        cfg.K = small_count(doc.at("K"), "K");
    if (doc.contains("Jmax"))
    {
        cfg.Jmax = small_count(doc.at("Jmax"), "Jmax");
        cfg.jmax_given = true;
    }
    if (doc.contains("v"))
    {
        const auto& v = doc.at("v");
        if (!v.is_array())
            throw ConfigError("v", "expected an array of marks");
        std::vector<double> marks;
        for (const auto& x : v)
        {
            const double m = number(x, "v");
            if (m < 0.0 || m > 1.0)
                throw ConfigError("v", "marks must lie in [0, 1]");
            marks.push_back(m);
        }
        cfg.v = std::move(marks);
    }
    if (doc.contains("seed"))
        cfg.seed = unsigned64(doc.at("seed"), "seed");
    if (doc.contains("reps"))
    {
        cfg.reps = unsigned64(doc.at("reps"), "reps");
        if (cfg.reps == 0)
            throw ConfigError("reps", "must be positive");
    }
    if (doc.contains("horizon"))
        cfg.horizon = nonnegative(doc.at("horizon"), "horizon");
    if (doc.contains("ode"))
    {
        const auto& ode = doc.at("ode");
        if (!ode.is_object())
            throw ConfigError("ode", "expected an object {abs_tol, rel_tol}");
        for (const auto& [key, value] : ode.items())
        {
            if (key == "abs_tol")
                cfg.ode.abs_tol = number(value, "ode.abs_tol");
            else if (key == "rel_tol")
                cfg.ode.rel_tol = number(value, "ode.rel_tol");
            else
                throw ConfigError("ode." + key, "unknown field");
        }
        if (!(cfg.ode.abs_tol > 0.0))
            throw ConfigError("ode.abs_tol", "must be positive");
        if (!(cfg.ode.rel_tol > 0.0))
            throw ConfigError("ode.rel_tol", "must be positive");
    }
    if (doc.contains("output"))
    {
        const auto& out = doc.at("output");
        if (!out.is_string() || (out != "tsv" && out != "json"))
            throw ConfigError("output", "expected \"tsv\" or \"json\"");
        cfg.output = out.get<std::string>();
    }
    return cfg;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(buffer.str());
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace bpcross::cli
