#include <doctest.h>

#include "cli.hpp"
#include "config.hpp"
#include "table_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bpcross;
using namespace bpcross::cli;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

std::string write_config(const std::string& name, const std::string& json)
{
    const auto path = std::filesystem::path(BPCROSS_TEST_TMP) / name;
    std::ofstream(path) << json;
    return path.string();
}

Result invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("rho prints twelve significant digits")
{
    auto cfg = write_config("rho.json", R"({"law": {"0": 0.25, "2": 0.75}})");
    auto r = invoke({"rho", "--config", cfg});
    CHECK(r.code == 0);
    CHECK(r.out == "0.333333333333\n");

    auto marked = write_config("rho_v.json", R"({"law": {"0": 1, "2": 1}, "v": [0.5]})");
    r = invoke({"rho", "--config", marked});
    CHECK(r.out == "0.292893218813\n");
}

TEST_CASE("dist at time zero is a single row")
{
    auto cfg = write_config("dist0.json", R"({"law": {"0": 1, "2": 1}, "t": 0})");
    auto r = invoke({"dist", "--config", cfg});
    CHECK(r.code == 0);
    CHECK(r.out == "k0\tvalue\n0\t1.0\n");
}

TEST_CASE("tables round-trip through tsv and json")
{
    auto cfg = write_config("joint.json",
                            R"({"law": {"0": 1, "2": 0.6, "3": 0.2}, "crossing_set": [0, 3], "t": 0.7, "K": 6, "Jmax": 8})");
    for (const std::string command : {"dist", "joint", "rho-taylor"})
    {
        auto tsv = invoke({command, "--config", cfg, "--raw"});
        REQUIRE(tsv.code == 0);
        auto records = parse_tsv(tsv.out);
        CHECK(to_tsv(records) == tsv.out);
        auto table = table_from_records(records);
        CHECK(table.form() == (command == "joint" ? TableForm::joint : TableForm::marginal));

        auto json = invoke({command, "--config", cfg, "--raw", "--format", "json"});
        REQUIRE(json.code == 0);
        auto from_json = parse_json(nlohmann::json::parse(json.out));
        CHECK(from_json == records);
        CHECK(table_from_records(from_json).entries() == table.entries());
    }
}

TEST_CASE("format_double is shortest round-trip")
{
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    for (double x : {0.1 + 0.2, 1.0 / 3.0, 2.5e-17, 123456.789})
        CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("time grids add a t column")
{
    auto cfg = write_config("grid.json", R"({"law": {"0": 1, "2": 1}, "t_grid": [0, 0.5], "K": 1})");
    auto r = invoke({"dist", "--config", cfg});
    CHECK(r.code == 0);
    auto records = parse_tsv(r.out);
    CHECK(records.index_columns == std::vector<std::string>{"t", "k0"});
    CHECK(records.rows.size() == 3);

    auto pgf = write_config("pgf.json", R"({"law": {"0": 1, "2": 1}, "t_grid": [0, 1], "v": [0.5], "i0": 2})");
    r = invoke({"pgf", "--config", pgf});
    CHECK(r.code == 0);
    auto rows = parse_tsv(r.out).rows;
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value == 1.0);
    CHECK(rows[1].value < 1.0);
}

TEST_CASE("closed forms from the config law")
{
    auto cfg = write_config("bd.json", R"({"law": {"0": 1, "2": 1}, "K": 4})");
    auto r = invoke({"closed-form", "bd", "--config", cfg});
    CHECK(r.code == 0);
    auto rows = parse_tsv(r.out).rows;
    CHECK(rows[1].value == 0.5);

    auto cubic = write_config("cubic.json", R"({"law": {"0": 1, "3": 1}, "K": 5})");
    r = invoke({"closed-form", "cubic", "--config", cubic});
    CHECK(r.code == 0);
    CHECK(parse_tsv(r.out).rows[5].value == 3.0 / 128.0);

    r = invoke({"closed-form", "cubic", "--config", cfg});
    CHECK(r.code == 2);
    CHECK(r.err.find("law") != std::string::npos);
}

TEST_CASE("simulate is reproducible")
{
    auto cfg = write_config("sim.json", R"({"law": {"0": 1, "2": 1}, "t": 1, "reps": 3000, "seed": 5})");
    auto a = invoke({"simulate", "--config", cfg, "--threads", "1"});
    auto b = invoke({"simulate", "--config", cfg, "--threads", "8"});
    auto c = invoke({"simulate", "--config", cfg, "--seed", "6"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);

    const auto path = (std::filesystem::path(BPCROSS_TEST_TMP) / "sim_out.tsv").string();
    auto to_file = invoke({"simulate", "--config", cfg, "--output", path});
    CHECK(to_file.out.empty());
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == a.out);
}

TEST_CASE("validate exit codes")
{
    auto cfg = write_config("validate.json", R"({"law": {"0": 1.5, "2": 0.5}, "t": 1, "reps": 5000, "Jmax": 30, "K": 15})");
    auto ok = invoke({"validate", "--config", cfg, "--threads", "4"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("uniformization: PASS") != std::string::npos);

    auto json = invoke({"validate", "--config", cfg, "--format", "json"});
    CHECK(json.code == 0);
    auto doc = nlohmann::json::parse(json.out);
    CHECK(doc.at("passed") == true);
    CHECK(doc.at("monte_carlo").at("replicates") == 5000);
}

TEST_CASE("usage and config errors exit with 2 and name the field")
{
    auto unknown = write_config("unknown.json", R"({"law": {"0": 1}, "tt": 1})");
    auto r = invoke({"dist", "--config", unknown});
    CHECK(r.code == 2);
    CHECK(r.err.find("tt") != std::string::npos);

    auto ode = write_config("ode.json", R"({"law": {"0": 1}, "t": 1, "ode": {"abs_tol": -1}})");
    r = invoke({"dist", "--config", ode});
    CHECK(r.code == 2);
    CHECK(r.err.find("ode.abs_tol") != std::string::npos);

    auto bad_law = write_config("law.json", R"({"law": {"1": 1}})");
    r = invoke({"rho", "--config", bad_law});
    CHECK(r.code == 2);
    CHECK(r.err.find("law.1") != std::string::npos);

    auto malformed = write_config("malformed.json", R"({"law": )");
    r = invoke({"rho", "--config", malformed});
    CHECK(r.code == 2);

    auto no_t = write_config("no_t.json", R"({"law": {"0": 1}})");
    r = invoke({"dist", "--config", no_t});
    CHECK(r.code == 2);
    CHECK(r.err.find("t:") != std::string::npos);

    r = invoke({"frobnicate", "--config", no_t});
    CHECK(r.code == 2);
    CHECK(r.err.find("frobnicate") != std::string::npos);

    r = invoke({"dist"});
    CHECK(r.code == 2);

    r = invoke({"dist", "--config", no_t, "--format", "xml"});
    CHECK(r.code == 2);

    r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Exit codes") != std::string::npos);
}

TEST_CASE("config parsing")
{
    auto cfg = parse_config(nlohmann::json::parse(
        R"({"law": {"0": 1, "2": 1}, "crossing_set": [0, 2], "t": 1, "i0": 3, "K": 7, "Jmax": 9,
            "v": [0.1, 0.2], "seed": 18446744073709551615, "reps": 12, "horizon": 5,
            "ode": {"abs_tol": 1e-12, "rel_tol": 1e-11}, "output": "json"})"));
    CHECK(cfg.law.size() == 2);
    CHECK(cfg.crossing_set == std::vector<int>{0, 2});
    CHECK(cfg.i0 == 3);
    CHECK(cfg.K == 7);
    CHECK(cfg.Jmax == 9);
    CHECK(cfg.jmax_given);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(cfg.ode.abs_tol == 1e-12);
    CHECK(cfg.output == "json");
    CHECK(cfg.times() == std::vector<double>{1.0});

    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"t": 1})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"law": {"0": 1}, "v": [2]})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"law": {"0": 1}, "reps": 0})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"law": {"0": 1}, "output": "csv"})")), ConfigError);
    CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"law": {"x": 1}})")), ConfigError);
}
