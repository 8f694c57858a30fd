// Scratch probe for tuning the default synthetic population. Not installed.
#include <cstdio>

#include "decarb/config.hpp"
#include "decarb/pipeline.hpp"

using namespace decarb;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: calibrate_probe <config.json>\n");
        return 1;
    }
    RunConfig cfg = load_config(argv[1]);
    Scenario scenario = build_scenario(cfg);
    auto pop = load_population(cfg);
    std::printf("pop=%zu grid_mean=%.1f\n", pop.size(), scenario.emissions.grid_intensity);

    for (double rate : {0.05, 0.02}) {
        Scenario s = scenario;
        s.cost.discount_rate = rate;
        ScenarioRunner runner(s, pop);
        const double median_hg = median_heating_gas(pop);
        std::printf("median heating gas=%.1f therms\n", median_hg);

        CostScenario cost = s.cost;
        const auto report = break_even_analysis(pop, runner.outcomes(), cost, {5, 10, 15});
        std::printf("rate=%.2f breakeven fail: 5y=%.4f 10y=%.4f 15y=%.4f\n", rate,
                    report.failing_fraction[0], report.failing_fraction[1],
                    report.failing_fraction[2]);
        for (int T : {5, 10, 15}) {
            Scenario st = s;
            st.cost.payback_years = T;
            ScenarioRunner r2(st, pop);
            const auto sq = r2.run_status_quo();
            const auto opt = r2.run_optimal(dollars_to_cents(5e6));
            const auto bandit = r2.run_bandit(dollars_to_cents(5e6));
            std::printf(
                "  rate=%.2f T=%2d sq: n=%4d tons=%8.1f pct=%5.2f | bandit(5M): n=%4d "
                "tons=%8.1f obj=%10.0f | opt(5M): n=%4d tons=%8.1f obj=%10.0f | ord %s\n",
                rate, T, sq.adopters, sq.reduction_tons, sq.reduction_pct, bandit.adopters,
                bandit.reduction_tons, cents_to_dollars(bandit.objective_cents), opt.adopters,
                opt.reduction_tons, cents_to_dollars(opt.objective_cents),
                (sq.objective_cents <= bandit.objective_cents &&
                 bandit.objective_cents <= opt.objective_cents)
                    ? "OK"
                    : "VIOLATED");
        }
    }

    // Budget sweep ordering + gap growth at defaults.
    {
        ScenarioRunner runner(scenario, pop);
        Money prev_gap = -1;
        bool ordered = true;
        bool gap_ok = true;
        Money prev_opt = -1;
        for (int b = 1; b <= 10; ++b) {
            const Money budget = dollars_to_cents(1e6 * b);
            const auto result = runner.run_budget(budget);
            const Money gap = result.optimal.objective_cents - result.bandit.objective_cents;
            if (!(result.status_quo.objective_cents <= result.bandit.objective_cents &&
                  result.bandit.objective_cents <= result.optimal.objective_cents)) {
                ordered = false;
            }
            if (prev_gap >= 0 && gap < prev_gap) {
                gap_ok = false;
            }
            if (prev_opt >= 0 && result.optimal.objective_cents < prev_opt) {
                std::printf("  opt non-monotone at B=%dM\n", b);
            }
            prev_opt = result.optimal.objective_cents;
            prev_gap = gap;
            std::printf("B=%2dM sq=%9.0f bandit=%9.0f opt=%9.0f gap=%9.0f spendB=%9.0f\n", b,
                        cents_to_dollars(result.status_quo.objective_cents),
                        cents_to_dollars(result.bandit.objective_cents),
                        cents_to_dollars(result.optimal.objective_cents),
                        cents_to_dollars(gap), cents_to_dollars(result.bandit.spend));
        }
        std::printf("sweep ordered=%s gap_nondecreasing=%s\n", ordered ? "yes" : "NO",
                    gap_ok ? "yes" : "NO");
    }

    // Grid-trace monotonicity of Optimal (absolute tons), fixed prices.
    {
        const char* traces[] = {"BPAT", "CAISO", "ISONE", "PJM", "SC"};
        double prev_tons = -1;
        double prev_intensity = -1;
        bool monotone = true;
        for (const char* name : traces) {
            Scenario s = scenario;
            s.emissions.grid_intensity = load_grid_trace_mean(
                cfg.grid_trace.parent_path() / (std::string(name) + ".csv"));
            ScenarioRunner r(s, pop);
            const auto opt = r.run_optimal(dollars_to_cents(5e6));
            std::printf("trace=%-6s intensity=%6.1f opt tons=%9.1f pct=%6.2f\n", name,
                        s.emissions.grid_intensity, opt.reduction_tons, opt.reduction_pct);
            if (prev_tons >= 0 && s.emissions.grid_intensity > prev_intensity &&
                opt.reduction_tons < prev_tons) {
                monotone = false;
            }
            prev_tons = opt.reduction_tons;
            prev_intensity = s.emissions.grid_intensity;
        }
        std::printf("trace monotone=%s\n", monotone ? "yes" : "NO");
    }
    return 0;
}
