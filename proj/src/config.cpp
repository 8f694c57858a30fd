#include "decarb/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "decarb/csvio.hpp"

namespace decarb {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(where + " is missing required key '" + key + "'");
    }
    return *it;
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
    const json& v = require(obj, where, key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + " must be a number");
    }
    return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const std::string& key,
                 double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if (!it->is_number()) {
        throw ConfigError(where + "." + key + " must be a number");
    }
    return it->get<double>();
}

Marginal parse_marginal(const json& obj, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    const std::string family = require(obj, where, "family").get<std::string>();
    Marginal m;
    if (family == "lognormal") {
        check_keys(obj, where, {"family", "mean", "sigma_log"});
        m.family = Marginal::Family::LogNormal;
        m.a = require_number(obj, where, "mean");
        m.b = require_number(obj, where, "sigma_log");
    } else if (family == "normal") {
        check_keys(obj, where, {"family", "mean", "sd"});
        m.family = Marginal::Family::Normal;
        m.a = require_number(obj, where, "mean");
        m.b = require_number(obj, where, "sd");
    } else if (family == "uniform") {
        check_keys(obj, where, {"family", "low", "high"});
        m.family = Marginal::Family::Uniform;
        m.a = require_number(obj, where, "low");
        m.b = require_number(obj, where, "high");
    } else {
        throw ConfigError(where + ".family must be lognormal, normal or uniform");
    }
    return m;
}

std::filesystem::path resolve_resource(const std::filesystem::path& config_dir,
                                       const std::string& value, const std::string& where,
                                       bool is_trace_name) {
    std::vector<std::filesystem::path> roots;
    roots.push_back(config_dir);
    if (const char* env = std::getenv("DECARB_DATA_DIR")) {
        roots.emplace_back(env);
    }
    roots.push_back(config_dir / ".." / "data"); // sibling data/ of the config directory

    std::vector<std::filesystem::path> candidates;
    const std::filesystem::path direct(value);
    if (direct.is_absolute()) {
        candidates.push_back(direct);
    } else {
        for (const auto& root : roots) {
            candidates.push_back(root / direct);
        }
    }
    if (is_trace_name && value.find('/') == std::string::npos &&
        value.find(".csv") == std::string::npos) {
        for (const auto& root : roots) {
            candidates.push_back(root / "traces" / (value + ".csv"));
        }
    }
    for (const auto& candidate : candidates) {
        if (std::filesystem::exists(candidate)) {
            return std::filesystem::weakly_canonical(candidate);
        }
    }
    throw ConfigError(where + ": cannot resolve resource '" + value + "'");
}

EquityMode parse_mode(const std::string& text, const std::string& where) {
    if (text == "agnostic") {
        return EquityMode::Agnostic;
    }
    if (text == "equity") {
        return EquityMode::Equity;
    }
    if (text == "strict_equity_over_time") {
        return EquityMode::StrictEquityOverTime;
    }
    if (text == "relaxed_equity_over_time") {
        return EquityMode::RelaxedEquityOverTime;
    }
    throw ConfigError(where + ": unknown equity mode '" + text + "'");
}

} // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    const std::filesystem::path config_dir =
        std::filesystem::weakly_canonical(path).parent_path();

    check_keys(doc, "config",
               {"seed", "scenario_year", "population", "resources", "cost", "equipment",
                "carbon", "allocation", "survey", "acceptance_noise_usd", "breakeven_horizons",
                "output"});

    RunConfig cfg;
    if (doc.contains("seed")) {
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    cfg.scenario.seed = cfg.seed;
    cfg.scenario.scenario_year =
        static_cast<int>(number_or(doc, "config", "scenario_year", 2025));

    // population
    {
        const json& pop = require(doc, "config", "population");
        const std::string source = require(pop, "population", "source").get<std::string>();
        if (source == "synthetic") {
            check_keys(pop, "population",
                       {"source", "count", "seed", "income", "gas", "electric",
                        "summer_fraction", "roof_area", "income_gas_correlation"});
            cfg.synthetic_population = true;
            PopulationSpec spec;
            spec.count = static_cast<int>(require_number(pop, "population", "count"));
            spec.seed = pop.contains("seed") ? pop["seed"].get<std::uint64_t>() : cfg.seed;
            if (pop.contains("income")) {
                spec.income = parse_marginal(pop["income"], "population.income");
            }
            if (pop.contains("gas")) {
                spec.gas = parse_marginal(pop["gas"], "population.gas");
            }
            if (pop.contains("electric")) {
                spec.electric = parse_marginal(pop["electric"], "population.electric");
            }
            if (pop.contains("summer_fraction")) {
                spec.summer_fraction =
                    parse_marginal(pop["summer_fraction"], "population.summer_fraction");
            }
            if (pop.contains("roof_area")) {
                spec.roof_area = parse_marginal(pop["roof_area"], "population.roof_area");
            }
            spec.income_gas_correlation =
                number_or(pop, "population", "income_gas_correlation", 0.35);
            try {
                spec.validate();
            } catch (const InvalidSpec& e) {
                throw ConfigError(std::string("population: ") + e.what());
            }
            cfg.population_spec = spec;
        } else if (source == "csv") {
            check_keys(pop, "population", {"source", "path"});
            cfg.synthetic_population = false;
            cfg.population_csv = resolve_resource(
                config_dir, require(pop, "population", "path").get<std::string>(),
                "population.path", false);
        } else {
            throw ConfigError("population.source must be 'synthetic' or 'csv'");
        }
    }

    // resources
    {
        const json& res = require(doc, "config", "resources");
        check_keys(res, "resources",
                   {"solar_profile", "temperature_profile", "grid_trace", "scc_table"});
        cfg.solar_profile = resolve_resource(
            config_dir, require(res, "resources", "solar_profile").get<std::string>(),
            "resources.solar_profile", false);
        cfg.temperature_profile = resolve_resource(
            config_dir, require(res, "resources", "temperature_profile").get<std::string>(),
            "resources.temperature_profile", false);
        cfg.grid_trace_name = require(res, "resources", "grid_trace").get<std::string>();
        cfg.grid_trace =
            resolve_resource(config_dir, cfg.grid_trace_name, "resources.grid_trace", true);
        cfg.scc_table = resolve_resource(
            config_dir, require(res, "resources", "scc_table").get<std::string>(),
            "resources.scc_table", false);
    }

    // cost
    if (doc.contains("cost")) {
        const json& cost = doc["cost"];
        check_keys(cost, "cost",
                   {"discount_rate", "payback_years", "gas_price_usd_per_therm",
                    "electric_price_usd_per_kwh"});
        cfg.scenario.cost.discount_rate = number_or(cost, "cost", "discount_rate", 0.05);
        cfg.scenario.cost.payback_years =
            static_cast<int>(number_or(cost, "cost", "payback_years", 10));
        cfg.scenario.cost.gas_price =
            number_or(cost, "cost", "gas_price_usd_per_therm", 1.160);
        cfg.scenario.cost.electric_price =
            number_or(cost, "cost", "electric_price_usd_per_kwh", 0.14072);
        try {
            cfg.scenario.cost.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("cost: ") + e.what());
        }
    }

    // equipment
    if (doc.contains("equipment")) {
        const json& eq = doc["equipment"];
        check_keys(eq, "equipment",
                   {"solar_usd_per_kw", "battery_usd_per_kwh", "heatpump_benchmark_usd",
                    "waterheater_usd", "cop", "area_m2_per_kw", "daytime_fraction",
                    "appliance_efficiency", "heating_base_temp_c", "include_solar"});
        cfg.scenario.prices.solar_per_kw = number_or(eq, "equipment", "solar_usd_per_kw", 2002.0);
        cfg.scenario.prices.battery_per_kwh =
            number_or(eq, "equipment", "battery_usd_per_kwh", 1047.0);
        cfg.scenario.prices.heatpump_benchmark =
            number_or(eq, "equipment", "heatpump_benchmark_usd", 5250.0);
        cfg.scenario.prices.waterheater = number_or(eq, "equipment", "waterheater_usd", 1575.0);
        if (eq.contains("cop")) {
            const json& cop = eq["cop"];
            check_keys(cop, "equipment.cop",
                       {"at_reference", "slope_per_c", "reference_temp_c", "floor"});
            cfg.scenario.cop.cop_at_reference =
                number_or(cop, "equipment.cop", "at_reference", 3.0);
            cfg.scenario.cop.slope = number_or(cop, "equipment.cop", "slope_per_c", 0.06);
            cfg.scenario.cop.reference_temp =
                number_or(cop, "equipment.cop", "reference_temp_c", 8.0);
            cfg.scenario.cop.floor = number_or(cop, "equipment.cop", "floor", 1.5);
        }
        cfg.scenario.profiles.area_per_kw = number_or(eq, "equipment", "area_m2_per_kw", 5.5);
        cfg.scenario.profiles.daytime_fraction =
            number_or(eq, "equipment", "daytime_fraction", 0.5);
        cfg.scenario.profiles.appliance_efficiency =
            number_or(eq, "equipment", "appliance_efficiency", 0.9);
        cfg.scenario.profiles.heating_base_temp =
            number_or(eq, "equipment", "heating_base_temp_c", 18.0);
        if (eq.contains("include_solar")) {
            cfg.scenario.profiles.include_solar = eq["include_solar"].get<bool>();
        }
    }

    // carbon
    if (doc.contains("carbon")) {
        const json& carbon = doc["carbon"];
        check_keys(carbon, "carbon", {"gas_kg_per_therm"});
        cfg.scenario.emissions.gas_emission_factor =
            number_or(carbon, "carbon", "gas_kg_per_therm", 5.3);
    }

    // allocation
    {
        const json& alloc = require(doc, "config", "allocation");
        check_keys(alloc, "allocation",
                   {"budgets_usd", "equity_mode", "equity_shares", "horizon_years", "rollover"});
        const json& budgets = require(alloc, "allocation", "budgets_usd");
        if (!budgets.is_array() || budgets.empty()) {
            throw ConfigError("allocation.budgets_usd must be a non-empty array");
        }
        for (const auto& b : budgets) {
            const double usd = b.get<double>();
            if (!(usd > 0.0)) {
                throw ConfigError("allocation.budgets_usd entries must be positive");
            }
            cfg.scenario.budgets.push_back(dollars_to_cents(usd));
        }
        if (alloc.contains("equity_mode")) {
            cfg.scenario.equity_mode =
                parse_mode(alloc["equity_mode"].get<std::string>(), "allocation.equity_mode");
        }
        if (alloc.contains("equity_shares")) {
            const json& shares = alloc["equity_shares"];
            check_keys(shares, "allocation.equity_shares", {"low", "medium", "high"});
            EquitySpec eq;
            eq.shares = {
                {IncomeGroup::Low, require_number(shares, "allocation.equity_shares", "low")},
                {IncomeGroup::Medium,
                 require_number(shares, "allocation.equity_shares", "medium")},
                {IncomeGroup::High, require_number(shares, "allocation.equity_shares", "high")}};
            try {
                eq.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("allocation.equity_shares: ") + e.what());
            }
            cfg.scenario.equity = eq;
        }
        cfg.scenario.horizon_years =
            static_cast<int>(number_or(alloc, "allocation", "horizon_years", 1));
        if (cfg.scenario.horizon_years < 1) {
            throw ConfigError("allocation.horizon_years must be at least 1");
        }
        if (alloc.contains("rollover")) {
            cfg.scenario.rollover = alloc["rollover"].get<bool>();
        }
    }

    // survey
    if (doc.contains("survey")) {
        const json& survey = doc["survey"];
        check_keys(survey, "survey",
                   {"n", "nominal_incentive_usd", "tier_quantiles", "extra_rounds",
                    "arm_weights", "reward_cap", "n_sweep", "diag_seeds"});
        cfg.scenario.survey_n = static_cast<int>(number_or(survey, "survey", "n", 1000));
        if (cfg.scenario.survey_n < 1) {
            throw ConfigError("survey.n must be at least 1");
        }
        cfg.scenario.arms.nominal_incentive =
            dollars_to_cents(number_or(survey, "survey", "nominal_incentive_usd", 100.0));
        if (survey.contains("tier_quantiles")) {
            cfg.scenario.arms.tier_quantiles =
                survey["tier_quantiles"].get<std::vector<double>>();
        }
        cfg.scenario.extra_rounds =
            static_cast<int>(number_or(survey, "survey", "extra_rounds", 1));
        if (survey.contains("arm_weights")) {
            cfg.scenario.survey.arm_weights = survey["arm_weights"].get<std::vector<double>>();
        }
        cfg.scenario.survey.reward_cap = number_or(survey, "survey", "reward_cap", 0.0);
        if (survey.contains("n_sweep")) {
            cfg.survey_n_sweep = survey["n_sweep"].get<std::vector<int>>();
        }
        cfg.diag_seeds = static_cast<int>(number_or(survey, "survey", "diag_seeds", 10));
    }

    cfg.scenario.acceptance_noise_usd =
        number_or(doc, "config", "acceptance_noise_usd", 0.0);

    if (doc.contains("breakeven_horizons")) {
        cfg.breakeven_horizons = doc["breakeven_horizons"].get<std::vector<int>>();
        for (int t : cfg.breakeven_horizons) {
            if (t < 1) {
                throw ConfigError("breakeven_horizons entries must be at least 1");
            }
        }
    }

    // output
    if (doc.contains("output")) {
        const json& output = doc["output"];
        check_keys(output, "output", {"dir", "prefix"});
        if (output.contains("dir")) {
            cfg.out_dir = output["dir"].get<std::string>();
        }
        if (output.contains("prefix")) {
            cfg.prefix = output["prefix"].get<std::string>();
        }
    }

    return cfg;
}

std::vector<double> load_profile_csv(const std::filesystem::path& path,
                                     const std::string& value_column) {
    const CsvTable table = read_csv(path);
    const auto col = table.column(value_column);
    if (!col) {
        throw ConfigError("profile " + path.string() + " needs column " + value_column);
    }
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        values.push_back(std::stod(row[*col]));
    }
    if (values.empty()) {
        throw ConfigError("profile " + path.string() + " has no rows");
    }
    return values;
}

Scenario build_scenario(const RunConfig& config) {
    Scenario s = config.scenario;
    s.profiles.solar_shape = load_profile_csv(config.solar_profile, "kwh_per_kw");
    s.profiles.temperature = load_profile_csv(config.temperature_profile, "temp_c");
    s.emissions.grid_intensity = load_grid_trace_mean(config.grid_trace);
    s.scc = SccSchedule::load_csv(config.scc_table);
    return s;
}

std::vector<Household> load_population(const RunConfig& config) {
    if (config.synthetic_population) {
        return generate_population(config.population_spec);
    }
    return ingest_households(config.population_csv);
}

} // namespace decarb
