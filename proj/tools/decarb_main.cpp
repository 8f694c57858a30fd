// Command-line front end: scenario runs, break-even analysis and the
// survey-size diagnostic, all driven by a JSON config.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "decarb/config.hpp"
#include "decarb/csvio.hpp"
#include "decarb/pipeline.hpp"
#include "decarb/rng.hpp"

namespace {

using namespace decarb;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

json policy_json(const PolicyOutcome& p) {
    json out;
    out["reduction_tco2_per_year"] = p.reduction_tons;
    out["reduction_pct"] = p.reduction_pct;
    out["objective_usd"] = cents_to_dollars(p.objective_cents);
    out["spend_usd"] = cents_to_dollars(p.spend);
    out["adopters"] = p.adopters;
    json groups;
    for (const auto& [group, spend] : p.group_spend) {
        groups[to_string(group)] = cents_to_dollars(spend);
    }
    out["group_spend_usd"] = groups;
    if (!p.years.empty()) {
        json years = json::array();
        for (const auto& y : p.years) {
            json row;
            row["year"] = y.year;
            row["spend_usd"] = cents_to_dollars(y.spend);
            row["added_tco2_per_year"] = y.added_tons;
            row["adopters"] = y.adopters;
            json group_spend;
            for (const auto& [group, spend] : y.group_spend) {
                group_spend[to_string(group)] = cents_to_dollars(spend);
            }
            row["group_spend_usd"] = group_spend;
            years.push_back(row);
        }
        out["years"] = years;
    }
    return out;
}

void append_policy_rows(std::ofstream& csv, const std::string& scenario,
                        const std::string& policy, Money budget, const PolicyOutcome& p) {
    const std::string base = scenario + "," + policy + "," + fixed(cents_to_dollars(budget), 2);
    csv << base << ",reduction_tco2_per_year," << fixed(p.reduction_tons) << "\n";
    csv << base << ",reduction_pct," << fixed(p.reduction_pct) << "\n";
    csv << base << ",objective_usd," << fixed(cents_to_dollars(p.objective_cents), 2) << "\n";
    csv << base << ",spend_usd," << fixed(cents_to_dollars(p.spend), 2) << "\n";
    csv << base << ",adopters," << p.adopters << "\n";
    for (const auto& [group, spend] : p.group_spend) {
        csv << base << ",spend_" << to_string(group) << "_usd,"
            << fixed(cents_to_dollars(spend), 2) << "\n";
    }
    for (const auto& y : p.years) {
        csv << base << ",year" << y.year << "_spend_usd," << fixed(cents_to_dollars(y.spend), 2)
            << "\n";
        csv << base << ",year" << y.year << "_added_tco2," << fixed(y.added_tons) << "\n";
    }
}

int cmd_run(const RunConfig& cfg, int workers) {
    const Scenario scenario = build_scenario(cfg);
    auto population = load_population(cfg);
    ScenarioRunner runner(scenario, std::move(population));

    std::filesystem::create_directories(cfg.out_dir);
    write_survey_csv(cfg.out_dir / (cfg.prefix + "_survey.csv"), runner.survey_data());

    const auto& budgets = runner.scenario().budgets;
    std::vector<RunResult> results(budgets.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= budgets.size()) {
                return;
            }
            results[i] = runner.run_budget(budgets[i]);
        }
    };
    std::vector<std::thread> threads;
    const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(budgets.size())));
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }

    std::ofstream csv(cfg.out_dir / (cfg.prefix + "_results.csv"));
    csv << "scenario,policy,budget_usd,metric,value\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunResult& r = results[i];
        json out;
        out["budget_usd"] = cents_to_dollars(r.budget);
        out["baseline_tco2_per_year"] = r.baseline_tons;
        out["grid_trace"] = cfg.grid_trace_name;
        out["equity_mode"] = to_string(runner.scenario().equity_mode);
        out["status_quo"] = policy_json(r.status_quo);
        out["bandit"] = policy_json(r.bandit);
        out["optimal"] = policy_json(r.optimal);
        json survey;
        survey["n"] = r.survey.n;
        survey["observed_cells"] = r.survey.observed_cells;
        survey["positive_reward_rate"] = r.survey.positive_reward_rate;
        out["survey"] = survey;

        char name[64];
        std::snprintf(name, sizeof(name), "%s_b%lld.json", cfg.prefix.c_str(),
                      static_cast<long long>(r.budget / 100));
        std::ofstream json_out(cfg.out_dir / name);
        json_out << out.dump(2) << "\n";

        append_policy_rows(csv, cfg.prefix, "status_quo", r.budget, r.status_quo);
        append_policy_rows(csv, cfg.prefix, "bandit", r.budget, r.bandit);
        append_policy_rows(csv, cfg.prefix, "optimal", r.budget, r.optimal);
    }
    return 0;
}

int cmd_breakeven(const RunConfig& cfg) {
    const Scenario scenario = build_scenario(cfg);
    const auto population = load_population(cfg);
    if (population.empty()) {
        throw EmptyPopulation("population file has no rows");
    }

    const double median_hg = median_heating_gas(population);
    std::vector<std::vector<RetrofitOutcome>> outcomes(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        for (Package pkg : kPackages) {
            outcomes[i].push_back(evaluate_retrofit(population[i], pkg, scenario.cop,
                                                    scenario.prices, scenario.profiles,
                                                    median_hg));
        }
    }
    const BreakEvenReport report =
        break_even_analysis(population, outcomes, scenario.cost, cfg.breakeven_horizons);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir / (cfg.prefix + "_breakeven_fractions.csv"));
        out << "payback_years,failing_fraction\n";
        for (std::size_t i = 0; i < report.horizons.size(); ++i) {
            out << report.horizons[i] << "," << fixed(report.failing_fraction[i]) << "\n";
        }
    }
    {
        std::ofstream out(cfg.out_dir / (cfg.prefix + "_breakeven_table.csv"));
        out << "household_id,package,break_even_year\n";
        for (const auto& row : report.table) {
            out << row.household_id << "," << to_string(row.package) << ","
                << row.break_even_year << "\n";
        }
    }
    return 0;
}

int cmd_survey_diag(const RunConfig& cfg) {
    if (cfg.survey_n_sweep.empty()) {
        throw ConfigError("survey.n_sweep is required for survey-diag");
    }
    const Scenario scenario = build_scenario(cfg);
    auto population = load_population(cfg);
    ScenarioRunner runner(scenario, std::move(population));
    const Money budget = runner.scenario().budgets.front();

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream values(cfg.out_dir / (cfg.prefix + "_survey_diag.csv"));
    values << "n,seed,bandit_reduction_tco2,bandit_reduction_pct,bandit_objective_usd\n";
    std::ofstream coverage(cfg.out_dir / (cfg.prefix + "_survey_coverage.csv"));
    coverage << "n,arm,context,count\n";

    for (int n : cfg.survey_n_sweep) {
        for (int s = 0; s < cfg.diag_seeds; ++s) {
            runner.resurvey(n, derive_seed(cfg.seed, "diag/" + std::to_string(n) + "/" +
                                                         std::to_string(s)));
            const PolicyOutcome bandit = runner.run_bandit(budget);
            values << n << "," << s << "," << fixed(bandit.reduction_tons) << ","
                   << fixed(bandit.reduction_pct) << ","
                   << fixed(cents_to_dollars(bandit.objective_cents), 2) << "\n";
            if (s == 0) {
                const LcbEstimator& est = runner.estimator();
                for (int k = 0; k < est.arms; ++k) {
                    for (int c = 0; c < est.contexts; ++c) {
                        const auto count = est.counts[est.cell(k, c)];
                        if (count > 0) {
                            coverage << n << "," << k << "," << c << "," << count << "\n";
                        }
                    }
                }
            }
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"City-scale decarbonization incentive allocation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    app.add_option("--config", config_path, "Path to the JSON run configuration")
        ->required()
        ->group("Global");
    app.add_option("--out", out_override, "Override the output directory")->group("Global");
    app.add_option("--seed", seed_override, "Override the top-level seed")->group("Global");
    app.add_option("--workers", workers, "Worker threads for sweep points")->group("Global");

    CLI::App* run = app.add_subcommand("run", "Run the configured scenario sweep");
    CLI::App* breakeven =
        app.add_subcommand("breakeven", "Emit the zero-incentive break-even analysis");
    CLI::App* diag =
        app.add_subcommand("survey-diag", "Sweep the survey size and report bandit value");
    for (CLI::App* sub : {run, breakeven, diag}) {
        sub->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_override.empty()) {
            cfg.out_dir = out_override;
        }
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.scenario.seed = *seed_override;
            if (cfg.synthetic_population) {
                cfg.population_spec.seed = *seed_override;
            }
        }
        if (run->parsed()) {
            return cmd_run(cfg, workers);
        }
        if (breakeven->parsed()) {
            return cmd_breakeven(cfg);
        }
        if (diag->parsed()) {
            return cmd_survey_diag(cfg);
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidSpec& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IngestError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const EmptyPopulation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SurveyLargerThanPopulation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
