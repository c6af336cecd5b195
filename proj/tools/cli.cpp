#include "cli.hpp"

#include "config.hpp"
#include "table_io.hpp"

#include <bpcross/closed_form.hpp>
#include <bpcross/engine.hpp>
#include <bpcross/roots.hpp>
#include <bpcross/sim.hpp>
#include <bpcross/validate.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace bpcross::cli
{

namespace
{

constexpr double oracle_tol = 1e-6;

struct Flags
{
    std::string config_path;
    std::string output = "-";
    std::string format;
    unsigned threads = 1;
    bool raw = false;
    std::optional<std::uint64_t> seed;
    std::string model;
};

/// Everything a subcommand needs, resolved from the config and flags.
struct Context
{
    Config cfg;
    OffspringLaw law;
    CrossingSet set;
    Flags flags;

    bool json() const { return flags.format == "json"; }
};

std::string fixed12(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

OffspringLaw resolve_law(const Config& cfg)
{
    try
    {
        return OffspringLaw::make(cfg.law);
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("law", e.what());
    }
}

CrossingSet resolve_set(const Config& cfg, const OffspringLaw& law)
{
    try
    {
        CrossingSet set(cfg.crossing_set);
        set.validate_for(law);
        return set;
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError("crossing_set", e.what());
    }
}

Context resolve(const Flags& flags)
{
    Config cfg = load_config(flags.config_path);
    OffspringLaw law = resolve_law(cfg);
    CrossingSet set = resolve_set(cfg, law);
    Context ctx{std::move(cfg), std::move(law), std::move(set), flags};
    if (flags.seed)
        ctx.cfg.seed = *flags.seed;
    if (ctx.flags.format.empty())
        ctx.flags.format = ctx.cfg.output.value_or("tsv");
    return ctx;
}

std::vector<double> require_times(const Context& ctx, const std::string& command)
{
    auto times = ctx.cfg.times();
    if (times.empty())
        throw ConfigError("t", "required by " + command + " (give t or t_grid)");
    return times;
}

double require_single_time(const Context& ctx, const std::string& command)
{
    if (!ctx.cfg.t_grid.empty() && ctx.cfg.t_grid.size() != 1)
        throw ConfigError("t_grid", command + " takes a single time");
    return require_times(ctx, command).front();
}

std::vector<double> require_marks(const Context& ctx, const std::string& command)
{
    if (!ctx.cfg.v)
        throw ConfigError("v", "required by " + command);
    if (ctx.cfg.v->size() != ctx.set.size())
        throw ConfigError("v", "needs one mark per crossing_set member (" + std::to_string(ctx.set.size()) + ")");
    return *ctx.cfg.v;
}

CoeffTable from_population(const CoeffTable& single, int i0)
{
    if (i0 == 1)
        return single;
    return convolve_power(single, i0, single.truncation());
}

void append(RecordTable& into, const RecordTable& part)
{
    if (into.index_columns.empty())
    {
        into = part;
        return;
    }
    into.rows.insert(into.rows.end(), part.rows.begin(), part.rows.end());
}

std::string render(const Context& ctx, const RecordTable& table, nlohmann::json meta = nlohmann::json::object())
{
    if (!ctx.json())
        return to_tsv(table);
    nlohmann::json doc = to_json(table);
    for (auto& [key, value] : meta.items())
        doc[key] = value;
    return doc.dump(2) + "\n";
}

/// Per-time tables; a t column is added only when a grid was requested.
template <typename Compute>
std::string time_tables(const Context& ctx, const std::string& command, Compute compute)
{
    const auto times = require_times(ctx, command);
    const bool grid = !ctx.cfg.t_grid.empty();
    RecordTable all;
    for (double t : times)
        append(all, records_from_table(compute(t), ctx.set, ctx.flags.raw, grid ? t : -1.0));
    return render(ctx, all);
}

std::string cmd_rho(const Context& ctx)
{
    const bool marked = ctx.cfg.v.has_value();
    RootResult root;
    if (marked)
        root = find_marked_root(ctx.law, ctx.set, require_marks(ctx, "rho"));
    else
    {
        const std::vector<double> ones(ctx.set.size(), 1.0);
        root = find_marked_root(ctx.law, ctx.set, ones);
    }
    const double rho = std::pow(root.value, ctx.cfg.i0);

    std::optional<ExtinctionEstimate> mc;
    if (ctx.cfg.horizon)
        mc = estimate_extinction(ctx.law, ctx.cfg.i0, ctx.cfg.reps, *ctx.cfg.horizon, ctx.cfg.seed, ctx.flags.threads);

    if (ctx.json())
    {
        nlohmann::json doc{{"rho", rho}, {"degraded", root.degraded}, {"iterations", root.iterations}};
        if (mc)
            doc["simulated"] = {{"estimate", mc->estimate},
                                {"std_error", mc->std_error},
                                {"absorbed", mc->absorbed},
                                {"escaped", mc->escaped},
                                {"replicates", mc->replicates}};
        return doc.dump(2) + "\n";
    }
    std::string text = fixed12(rho) + "\n";
    if (mc)
        text += "simulated\t" + fixed12(mc->estimate) + "\tstd_error\t" + fixed12(mc->std_error) + "\n";
    return text;
}

std::string cmd_rho_taylor(const Context& ctx)
{
    CoeffTable series = marked_root_series(ctx.law, ctx.set, ctx.cfg.K);
    if (ctx.cfg.i0 != 1)
        series = convolve_power(series, ctx.cfg.i0, series.truncation());
    return render(ctx, records_from_table(series, ctx.set, ctx.flags.raw));
}

std::string cmd_dist(const Context& ctx)
{
    return time_tables(ctx, "dist", [&](double t) {
        return from_population(crossing_distribution(ctx.law, ctx.set, t, ctx.cfg.K, ctx.cfg.ode), ctx.cfg.i0);
    });
}

std::string cmd_joint(const Context& ctx)
{
    if (ctx.cfg.i0 > ctx.cfg.Jmax)
        throw ConfigError("Jmax", "must be at least i0");
    return time_tables(ctx, "joint", [&](double t) {
        return from_population(joint_distribution(ctx.law, ctx.set, t, ctx.cfg.Jmax, ctx.cfg.K, ctx.cfg.ode),
                               ctx.cfg.i0);
    });
}

std::string cmd_pgf(const Context& ctx)
{
    const auto marks = require_marks(ctx, "pgf");
    RecordTable table;
    table.index_columns = {"t"};
    for (double t : require_times(ctx, "pgf"))
    {
        double value = crossing_pgf_from(ctx.law, ctx.set, t, marks, ctx.cfg.i0, ctx.cfg.ode);
        if (!ctx.flags.raw)
            value = std::clamp(value, 0.0, 1.0);
        table.rows.push_back({{t}, value});
    }
    return render(ctx, table);
}

std::string cmd_extinct_dist(const Context& ctx)
{
    CoeffTable table = extinction_conditioned_distribution(ctx.law, ctx.set, ctx.cfg.K);
    if (ctx.cfg.i0 != 1)
        table = convolve_power(table, ctx.cfg.i0, table.truncation());
    return render(ctx, records_from_table(table, ctx.set, ctx.flags.raw));
}

std::string cmd_closed_form(const Context& ctx)
{
    const int birth = ctx.flags.model == "bd" ? 2 : 3;
    const auto& rates = ctx.cfg.law;
    for (const auto& [j, rate] : rates)
        if ((j != 0 && j != birth) || !(rate > 0.0))
            throw ConfigError("law", "closed-form " + ctx.flags.model + " needs positive rates on exactly {0, " +
                                         std::to_string(birth) + "}");
    if (rates.size() != 2)
        throw ConfigError("law", "closed-form " + ctx.flags.model + " needs positive rates on exactly {0, " +
                                     std::to_string(birth) + "}");
    if (ctx.cfg.crossing_set != std::vector<int>{0})
        throw ConfigError("crossing_set", "closed forms count deaths only; use [0]");
    if (ctx.cfg.i0 != 1)
        throw ConfigError("i0", "closed forms start from one particle");

    const double b = rates.at(0) + rates.at(birth);
    const double p = rates.at(0) / b;
    const double q = rates.at(birth) / b;
    const bool bd = birth == 2;
    const int K = ctx.cfg.K;

    auto to_records = [&](const std::vector<double>& coeffs, double t) {
        RecordTable table;
        if (t >= 0.0)
            table.index_columns.push_back("t");
        table.index_columns.push_back("k0");
        for (std::size_t n = 0; n < coeffs.size(); ++n)
        {
            RecordTable::Row row;
            if (t >= 0.0)
                row.index.push_back(t);
            row.index.push_back(static_cast<double>(n));
            row.value = ctx.flags.raw ? coeffs[n] : std::clamp(coeffs[n], 0.0, 1.0);
            table.rows.push_back(std::move(row));
        }
        return table;
    };

    const auto times = ctx.cfg.times();
    if (times.empty())
    {
        auto series = bd ? closed_form::bd_extinction_series(p, q, K) : closed_form::cubic_extinction_series(p, q, K);
        return render(ctx, to_records(series, -1.0));
    }
    const bool grid = !ctx.cfg.t_grid.empty();
    RecordTable all;
    for (double t : times)
    {
        auto coeffs = bd ? closed_form::bd_death_coeffs(p, q, b, t, K) : closed_form::cubic_death_coeffs(p, q, b, t, K);
        append(all, to_records(coeffs, grid ? t : -1.0));
    }
    return render(ctx, all);
}

std::string cmd_simulate(const Context& ctx, std::ostream& err)
{
    const double t = require_single_time(ctx, "simulate");
    const auto table = monte_carlo(ctx.law, ctx.set, ctx.cfg.i0, t, ctx.cfg.reps, ctx.cfg.seed, ctx.flags.threads);
    if (table.capped > 0)
        err << "warning: " << table.capped << " paths exceeded the population cap and were dropped\n";
    nlohmann::json meta{{"replicates", table.replicates},
                        {"capped", table.capped},
                        {"seed", table.base_seed},
                        {"i0", table.initial_population},
                        {"t", table.t}};
    return render(ctx, records_from_counts(table, ctx.set), meta);
}

struct OracleCheck
{
    double max_abs_diff = 0.0;
    double leaked_mass = 0.0;
    std::uint64_t poisson_terms = 0;
    bool passed = false;
};

OracleCheck oracle_check(const Context& ctx, double t)
{
    if (ctx.cfg.i0 > ctx.cfg.Jmax)
        throw ConfigError("Jmax", "must be at least i0");
    const auto brute = uniformization_distribution(ctx.law, ctx.set, ctx.cfg.i0, t, ctx.cfg.Jmax, ctx.cfg.K);
    const auto engine =
        from_population(joint_distribution(ctx.law, ctx.set, t, ctx.cfg.Jmax, ctx.cfg.K, ctx.cfg.ode), ctx.cfg.i0);
    OracleCheck check;
    check.leaked_mass = brute.leaked_mass;
    check.poisson_terms = brute.poisson_terms;
    for (const auto& [key, value] : engine.entries())
        check.max_abs_diff = std::max(check.max_abs_diff, std::abs(value - brute.table.at(key)));
    for (const auto& [key, value] : brute.table.entries())
        check.max_abs_diff = std::max(check.max_abs_diff, std::abs(value - engine.at(key)));
    // Retained uniformization entries are lower bounds short by at most the leaked mass.
    check.passed = check.max_abs_diff < oracle_tol + check.leaked_mass;
    return check;
}

int cmd_validate(const Context& ctx, std::string& text)
{
    const double t = require_single_time(ctx, "validate");
    const auto analytic =
        from_population(crossing_distribution(ctx.law, ctx.set, t, ctx.cfg.K, ctx.cfg.ode), ctx.cfg.i0);
    const auto empirical =
        monte_carlo(ctx.law, ctx.set, ctx.cfg.i0, t, ctx.cfg.reps, ctx.cfg.seed, ctx.flags.threads);
    const ZReport report = mc_z_report(empirical, analytic);

    std::optional<OracleCheck> oracle;
    if (ctx.cfg.jmax_given)
        oracle = oracle_check(ctx, t);
    const bool passed = report.passed && (!oracle || oracle->passed);

    if (ctx.json())
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : report.cells)
            cells.push_back({{"k", std::vector<int>(c.key.counts().begin(), c.key.counts().end())}, {"observed", c.observed}, {"expected", c.expected}, {"z", c.z}});
        nlohmann::json doc{{"passed", passed},
                           {"monte_carlo",
                            {{"passed", report.passed},
                             {"replicates", report.replicates},
                             {"seed", ctx.cfg.seed},
                             {"max_abs_z", report.max_abs_z},
                             {"threshold", report.options.max_abs_z},
                             {"tv_distance", report.tv_distance},
                             {"cells", cells},
                             {"pooled",
                              {{"cells", report.pooled_cells},
                               {"observed", report.pooled_observed},
                               {"expected", report.pooled_expected},
                               {"z", report.pooled_z}}}}}};
        if (oracle)
            doc["oracle"] = {{"passed", oracle->passed},
                             {"max_abs_diff", oracle->max_abs_diff},
                             {"leaked_mass", oracle->leaked_mass},
                             {"poisson_terms", oracle->poisson_terms}};
        text = doc.dump(2) + "\n";
    }
    else
    {
        std::ostringstream os;
        os << "monte carlo: " << (report.passed ? "PASS" : "FAIL") << "  replicates=" << report.replicates
           << "  max|z|=" << fixed12(report.max_abs_z) << "  threshold=" << report.options.max_abs_z
           << "  tv=" << fixed12(report.tv_distance) << '\n';
        os << "cell\tobserved\texpected\tz\n";
        for (const auto& c : report.cells)
            os << c.key.to_string() << '\t' << c.observed << '\t' << fixed12(c.expected) << '\t' << fixed12(c.z)
               << '\n';
        os << "pooled(" << report.pooled_cells << ")\t" << report.pooled_observed << '\t'
           << fixed12(report.pooled_expected) << '\t' << fixed12(report.pooled_z) << '\n';
        if (oracle)
            os << "uniformization: " << (oracle->passed ? "PASS" : "FAIL")
               << "  max|diff|=" << fixed12(oracle->max_abs_diff) << "  leaked_mass=" << fixed12(oracle->leaked_mass)
               << '\n';
        os << (passed ? "PASS" : "FAIL") << '\n';
        text = os.str();
    }
    return passed ? exit_ok : exit_failed_check;
}

void emit(const Flags& flags, const std::string& text, std::ostream& out)
{
    if (flags.output == "-")
    {
        out << text;
        return;
    }
    std::ofstream file(flags.output, std::ios::binary);
    if (!file)
        throw ConfigError("--output", "cannot open " + flags.output);
    file << text;
    if (!file)
        throw ConfigError("--output", "write failed for " + flags.output);
}

const char* footer = R"(Config document (JSON, unknown fields rejected):
  law           object "j": rate for offspring sizes j != 1 (required)
  crossing_set  tracked offspring sizes (default [0])
  t, t_grid     time or list of times
  i0            initial population (default 1)
  K             order cap on crossing counts (default 20)
  Jmax          population cap for joint tables (default 40)
  v             marks, one per crossing_set member
  seed, reps    simulation seed (default 0) and replicates (default 10000)
  horizon       when set, rho also reports a simulated extinction estimate
  ode           {abs_tol (default 1e-10), rel_tol (default 1e-8)}
  output        "tsv" (default) or "json"
Exit codes: 0 success, 1 failed validation, 2 usage, config or domain error.)";

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Flags flags;
    CLI::App app{"Crossing-count distributions for Markov branching processes", "bpcross"};
    app.footer(footer);
    app.require_subcommand(0, 1);
    app.allow_extras();
    app.fallthrough();
    app.add_option("--config", flags.config_path, "JSON config document")->required();
    app.add_option("--output", flags.output, "output path, - for stdout")->capture_default_str();
    app.add_option("--format", flags.format, "tsv or json (default: config output, else tsv)")
        ->check(CLI::IsMember({"tsv", "json"}));
    app.add_option("--threads", flags.threads, "worker threads for simulate/validate, 0 = all cores")
        ->capture_default_str();
    app.add_flag("--raw", flags.raw, "do not clamp emitted probabilities to [0, 1]");
    app.add_option("--seed", flags.seed, "simulation seed, overrides the config");

    auto* rho = app.add_subcommand("rho", "extinction probability, or the marked root when v is given");
    auto* rho_taylor = app.add_subcommand("rho-taylor", "distribution of crossings before extinction (unnormalised)");
    auto* dist = app.add_subcommand("dist", "P(crossings at t = k)");
    auto* joint = app.add_subcommand("joint", "P(population = j, crossings = k) at t");
    auto* pgf = app.add_subcommand("pgf", "E[v^crossings(t)] from i0 particles");
    auto* extinct = app.add_subcommand("extinct-dist", "crossings up to extinction, given extinction");
    auto* closed = app.add_subcommand("closed-form", "analytic death counts for the bd or cubic law");
    closed->add_option("model", flags.model, "bd or cubic")->required()->check(CLI::IsMember({"bd", "cubic"}));
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo counts of (population, crossings) at t");
    auto* validate = app.add_subcommand("validate", "z-test simulation against the analytic table; "
                                                    "with Jmax, also compare against uniformization");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("bpcross");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage)
        argv.push_back(a.data());

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    const auto extras = app.remaining();
    if (app.get_subcommands().empty())
    {
        if (extras.empty())
            err << "error: a subcommand is required (see --help)\n";
        else
            err << "error: unknown subcommand '" << extras.front() << "'\n";
        return exit_usage;
    }
    if (!extras.empty())
    {
        err << "error: unexpected argument '" << extras.front() << "'\n";
        return exit_usage;
    }

    try
    {
        const Context ctx = resolve(flags);
        std::string text;
        int code = exit_ok;
        if (rho->parsed())
            text = cmd_rho(ctx);
        else if (rho_taylor->parsed())
            text = cmd_rho_taylor(ctx);
        else if (dist->parsed())
            text = cmd_dist(ctx);
        else if (joint->parsed())
            text = cmd_joint(ctx);
        else if (pgf->parsed())
            text = cmd_pgf(ctx);
        else if (extinct->parsed())
            text = cmd_extinct_dist(ctx);
        else if (closed->parsed())
            text = cmd_closed_form(ctx);
        else if (simulate->parsed())
            text = cmd_simulate(ctx, err);
        else if (validate->parsed())
            code = cmd_validate(ctx, text);
        emit(ctx.flags, text, out);
        return code;
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << '\n';
    }
    catch (const IntegrationError& e)
    {
        err << "error: integration failed: " << e.what() << '\n';
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
    }
    return exit_usage;
}

} // namespace bpcross::cli
