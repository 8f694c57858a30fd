#include "decarb/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "decarb/rng.hpp"

namespace decarb {

const char* to_string(EquityMode mode) {
    switch (mode) {
    case EquityMode::Agnostic:
        return "agnostic";
    case EquityMode::Equity:
        return "equity";
    case EquityMode::StrictEquityOverTime:
        return "strict_equity_over_time";
    case EquityMode::RelaxedEquityOverTime:
        return "relaxed_equity_over_time";
    }
    return "unknown";
}

namespace {

struct Adoption {
    int package = 0; // package index
    int year = 1;    // 1-based adoption year
    Money paid = 0;
};

} // namespace

ScenarioRunner::ScenarioRunner(Scenario scenario, std::vector<Household> population)
    : scenario_(std::move(scenario)), population_(std::move(population)) {
    if (population_.empty()) {
        throw EmptyPopulation("scenario needs a population");
    }
    scenario_.cost.validate();
    scenario_.emissions.validate();
    scenario_.cop.validate();
    scenario_.prices.validate();
    if (scenario_.horizon_years < 1) {
        throw std::invalid_argument("horizon_years must be at least 1");
    }
    const bool over_time = scenario_.equity_mode == EquityMode::StrictEquityOverTime ||
                           scenario_.equity_mode == EquityMode::RelaxedEquityOverTime;
    if (scenario_.equity_mode == EquityMode::Equity && scenario_.horizon_years != 1) {
        throw std::invalid_argument("single-year equity mode requires horizon_years == 1");
    }
    if (over_time && scenario_.horizon_years < 1) {
        throw std::invalid_argument("over-time equity requires a horizon");
    }
    prepare();
}

void ScenarioRunner::prepare() {
    const std::size_t n = population_.size();

    const ContextTable contexts = discretize_contexts(population_);
    context_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        context_of_[i] = contexts.by_household.at(population_[i].id).index();
    }

    median_heating_gas_ = median_heating_gas(population_);

    outcomes_.resize(n);
    tons_.resize(n);
    value_cents_.resize(n);
    thresholds_.resize(n);
    threshold_cents_.resize(n);
    baseline_tons_ = 0.0;

    const std::uint64_t noise_base = derive_seed(scenario_.seed, "noise");
    for (std::size_t i = 0; i < n; ++i) {
        const Household& h = population_[i];
        baseline_tons_ += (h.annual_gas * scenario_.emissions.gas_emission_factor +
                           h.annual_electric * scenario_.emissions.grid_intensity / 1000.0) /
                          1000.0;
        outcomes_[i].clear();
        for (Package pkg : kPackages) {
            RetrofitOutcome outcome = evaluate_retrofit(h, pkg, scenario_.cop, scenario_.prices,
                                                        scenario_.profiles, median_heating_gas_);
            const double tons = annual_reduction(outcome, h, scenario_.emissions);
            const double usd = monetize(tons, scenario_.scenario_year, scenario_.scc);
            AcceptanceThreshold threshold = acceptance_threshold(h, outcome, scenario_.cost);
            if (scenario_.acceptance_noise_usd > 0.0) {
                threshold = perturb_threshold(
                    threshold, scenario_.acceptance_noise_usd,
                    derive_seed(noise_base, h.id + "/" + to_string(pkg)));
            }
            const auto p = static_cast<std::size_t>(package_index(pkg));
            tons_[i][p] = tons;
            value_cents_[i][p] = dollars_to_cents(usd);
            thresholds_[i][p] = threshold;
            threshold_cents_[i][p] = threshold.w_cents;
            outcomes_[i].push_back(std::move(outcome));
        }
    }

    // Survey phase: arms from all thresholds, one seeded survey, one fit.
    std::vector<AcceptanceThreshold> flat;
    flat.reserve(2 * n);
    for (const auto& per_household : thresholds_) {
        flat.push_back(per_household[0]);
        flat.push_back(per_household[1]);
    }
    arms_ = build_arms(flat, scenario_.arms);

    reduction_table_ = context_mean_reduction(context_of_, tons_, kContextCount);
    resurvey(scenario_.survey_n, derive_seed(scenario_.seed, "survey"));
}

void ScenarioRunner::resurvey(int n, std::uint64_t survey_seed) {
    scenario_.survey_n = n;
    survey_data_ = simulate_survey(context_of_, threshold_cents_, reduction_table_, arms_, n,
                                   survey_seed, scenario_.survey);
    estimator_ = fit_lcb(survey_data_, static_cast<int>(arms_.size()), kContextCount);
    best_arm_ = best_arms(estimator_, arms_);
}

int ScenarioRunner::best_value_package(std::size_t i) const {
    // Highest monetized reduction; ties go to FullReplacement.
    return value_cents_[i][1] >= value_cents_[i][0] ? 1 : 0;
}

std::optional<int> ScenarioRunner::best_free_package(std::size_t i) const {
    std::optional<int> best;
    for (int p = 0; p < 2; ++p) {
        if (threshold_cents_[i][static_cast<std::size_t>(p)] > 0) {
            continue;
        }
        if (!best || value_cents_[i][static_cast<std::size_t>(p)] >=
                         value_cents_[i][static_cast<std::size_t>(*best)]) {
            best = p; // iteration order makes ties resolve to FullReplacement
        }
    }
    return best;
}

Money ScenarioRunner::projected_cents(std::size_t i, int pkg, int offer_year) const {
    const auto p = static_cast<std::size_t>(pkg);
    if (scenario_.horizon_years <= 1) {
        return value_cents_[i][p];
    }
    const int adopt = scenario_.scenario_year + offer_year - 1;
    const int horizon = scenario_.scenario_year + scenario_.horizon_years - 1;
    return dollars_to_cents(projected_value(tons_[i][p], adopt, horizon, scenario_.scc));
}

namespace {

PolicyOutcome aggregate_policy(const std::vector<std::optional<Adoption>>& adoptions,
                               const std::vector<std::array<double, 2>>& tons,
                               double baseline_tons, int horizon_years,
                               const std::vector<Household>& pop,
                               const std::function<Money(std::size_t, int, int)>& objective_of) {
    PolicyOutcome out;
    std::vector<YearBreakdown> years(static_cast<std::size_t>(horizon_years));
    for (int y = 0; y < horizon_years; ++y) {
        years[static_cast<std::size_t>(y)].year = y + 1;
    }
    for (std::size_t i = 0; i < adoptions.size(); ++i) {
        if (!adoptions[i]) {
            continue;
        }
        const Adoption& a = *adoptions[i];
        const auto p = static_cast<std::size_t>(a.package);
        out.reduction_tons += tons[i][p];
        out.objective_cents += objective_of(i, a.package, a.year);
        out.spend += a.paid;
        out.adopters += 1;
        if (a.paid > 0) {
            out.group_spend[pop[i].income_group] += a.paid;
        }
        YearBreakdown& yb = years[static_cast<std::size_t>(a.year - 1)];
        yb.spend += a.paid;
        yb.added_tons += tons[i][p];
        yb.adopters += 1;
        if (a.paid > 0) {
            yb.group_spend[pop[i].income_group] += a.paid;
        }
    }
    out.reduction_pct = baseline_tons > 0.0 ? 100.0 * out.reduction_tons / baseline_tons : 0.0;
    if (horizon_years > 1) {
        out.years = std::move(years);
    }
    return out;
}

} // namespace

PolicyOutcome ScenarioRunner::run_status_quo() const {
    const std::size_t n = population_.size();
    std::vector<std::optional<Adoption>> adoptions(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto free_pkg = best_free_package(i)) {
            adoptions[i] = Adoption{*free_pkg, 1, 0};
        }
    }
    return aggregate_policy(adoptions, tons_, baseline_tons_, scenario_.horizon_years,
                            population_,
                            [this](std::size_t i, int pkg, int year) {
                                return projected_cents(i, pkg, year);
                            });
}

PolicyOutcome ScenarioRunner::run_optimal(Money budget) const {
    const std::size_t n = population_.size();
    std::vector<std::optional<Adoption>> adoptions(n);
    std::map<std::string, std::size_t> index_of;
    std::vector<KnapsackItem> items;
    for (std::size_t i = 0; i < n; ++i) {
        const int pkg = best_value_package(i);
        const Money w = threshold_cents_[i][static_cast<std::size_t>(pkg)];
        const Money v = value_cents_[i][static_cast<std::size_t>(pkg)];
        if (w > 0 && v > 0) {
            items.push_back({population_[i].id, v, w, population_[i].income_group});
            index_of[population_[i].id] = i;
        }
    }

    const int years = scenario_.horizon_years;
    const auto year_values = [this, &index_of](const std::string& id, int year) {
        const std::size_t i = index_of.at(id);
        return projected_cents(i, best_value_package(i), year);
    };
    // Households with a free fallback adopt it in year 1, so their paid
    // upgrade is only on the table during the first year.
    MultiYearOptions opts;
    opts.rollover = scenario_.rollover;
    opts.refresh = [this, &index_of](int year, const AllocationPlan&,
                                     std::vector<KnapsackItem>& pool) {
        if (year != 1) {
            return;
        }
        pool.erase(std::remove_if(pool.begin(), pool.end(),
                                  [&](const KnapsackItem& item) {
                                      return best_free_package(index_of.at(item.id)).has_value();
                                  }),
                   pool.end());
    };

    std::vector<AllocationPlan> plans;
    switch (scenario_.equity_mode) {
    case EquityMode::Agnostic:
        if (years == 1) {
            plans.push_back(solve_knapsack(items, budget));
        } else {
            plans = solve_multiyear(items, budget, years, year_values, opts);
        }
        break;
    case EquityMode::Equity:
        plans.push_back(solve_equity_knapsack(items, budget, scenario_.equity));
        break;
    case EquityMode::StrictEquityOverTime:
        plans = solve_multiyear_equity(items, budget, years, scenario_.equity,
                                       EquityOverTime::Strict, year_values, opts);
        break;
    case EquityMode::RelaxedEquityOverTime:
        plans = solve_multiyear_equity(items, budget, years, scenario_.equity,
                                       EquityOverTime::Relaxed, year_values, opts);
        break;
    }

    for (std::size_t y = 0; y < plans.size(); ++y) {
        for (const auto& [id, incentive] : plans[y].incentives) {
            const std::size_t i = index_of.at(id);
            adoptions[i] = Adoption{best_value_package(i), static_cast<int>(y) + 1, incentive};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!adoptions[i]) {
            if (const auto free_pkg = best_free_package(i)) {
                adoptions[i] = Adoption{*free_pkg, 1, 0};
            }
        }
    }
    return aggregate_policy(adoptions, tons_, baseline_tons_, years, population_,
                            [this](std::size_t i, int pkg, int year) {
                                return projected_cents(i, pkg, year);
                            });
}

PolicyOutcome ScenarioRunner::run_bandit(Money budget) const {
    const std::size_t n = population_.size();
    const int years = scenario_.horizon_years;
    std::vector<std::optional<Adoption>> adoptions(n);
    std::vector<char> in_pool(n, 1);

    Money carry = 0;
    std::map<IncomeGroup, Money> horizon_caps;
    if (scenario_.equity_mode == EquityMode::RelaxedEquityOverTime) {
        horizon_caps = scenario_.equity.split(budget);
    }

    for (int y = 1; y <= years; ++y) {
        const Money year_cap = years == 1 ? budget : budget / years + (scenario_.rollover ? carry : 0);

        // First-round offers from the learned table; nominal-tier offers swap
        // to the household's highest-reduction package.
        struct PendingOffer {
            int package = 0;
            Money incentive = 0;
        };
        std::vector<std::optional<PendingOffer>> accepted(n);
        Money accepted_spend = 0;
        auto offer_round = [&](int round) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!in_pool[i] || accepted[i]) {
                    continue;
                }
                const Arm& learned = arms_[static_cast<std::size_t>(
                    best_arm_[static_cast<std::size_t>(context_of_[i])])];
                const int tier = std::min(learned.tier + round, kTiersPerPackage);
                const Arm& offered_arm = arms_[static_cast<std::size_t>(
                    package_index(learned.package) * kTiersPerPackage + tier - 1)];
                int pkg = package_index(offered_arm.package);
                if (round == 0 && learned.tier == 1) {
                    pkg = best_value_package(i);
                }
                if (offered_arm.incentive >= threshold_cents_[i][static_cast<std::size_t>(pkg)]) {
                    accepted[i] = PendingOffer{pkg, offered_arm.incentive};
                    accepted_spend += offered_arm.incentive;
                }
            }
        };
        offer_round(0);
        for (int r = 1; r <= scenario_.extra_rounds && accepted_spend < year_cap; ++r) {
            offer_round(r);
        }

        std::map<std::string, std::size_t> index_of;
        std::vector<KnapsackItem> items;
        for (std::size_t i = 0; i < n; ++i) {
            if (!accepted[i]) {
                continue;
            }
            const auto p = static_cast<std::size_t>(accepted[i]->package);
            Money value = years == 1 ? value_cents_[i][p]
                                     : projected_cents(i, accepted[i]->package, y);
            items.push_back({population_[i].id, value, accepted[i]->incentive,
                             population_[i].income_group});
            index_of[population_[i].id] = i;
        }

        AllocationPlan plan;
        switch (scenario_.equity_mode) {
        case EquityMode::Agnostic:
            plan = solve_knapsack(items, year_cap);
            break;
        case EquityMode::Equity:
            plan = solve_equity_knapsack(items, year_cap, scenario_.equity);
            break;
        case EquityMode::StrictEquityOverTime:
            plan = solve_equity_knapsack(items, year_cap, scenario_.equity);
            break;
        case EquityMode::RelaxedEquityOverTime:
            plan = solve_capped_knapsack(items, year_cap, horizon_caps);
            for (const auto& [group, spend] : plan.per_group_spend) {
                horizon_caps[group] -= spend;
            }
            break;
        }
        carry = year_cap - plan.total_spend;

        for (const auto& [id, incentive] : plan.incentives) {
            const std::size_t i = index_of.at(id);
            adoptions[i] = Adoption{accepted[i]->package, y, incentive};
            in_pool[i] = 0;
        }
        // Unselected households with a free package adopt it in year 1 and
        // leave the pool.
        if (y == 1) {
            for (std::size_t i = 0; i < n; ++i) {
                if (in_pool[i]) {
                    if (const auto free_pkg = best_free_package(i)) {
                        adoptions[i] = Adoption{*free_pkg, 1, 0};
                        in_pool[i] = 0;
                    }
                }
            }
        }
    }

    return aggregate_policy(adoptions, tons_, baseline_tons_, years, population_,
                            [this](std::size_t i, int pkg, int year) {
                                return projected_cents(i, pkg, year);
                            });
}

RunResult ScenarioRunner::run_budget(Money budget) const {
    RunResult result;
    result.budget = budget;
    result.baseline_tons = baseline_tons_;
    result.status_quo = run_status_quo();
    result.optimal = run_optimal(budget);
    result.bandit = run_bandit(budget);
    result.survey.n = scenario_.survey_n;
    result.survey.observed_cells = static_cast<std::size_t>(
        std::count_if(estimator_.counts.begin(), estimator_.counts.end(),
                      [](std::int64_t c) { return c > 0; }));
    const auto positive = std::count_if(survey_data_.begin(), survey_data_.end(),
                                        [](const SurveyResponse& r) { return r.reward > 0.0; });
    result.survey.positive_reward_rate =
        survey_data_.empty() ? 0.0
                             : static_cast<double>(positive) /
                                   static_cast<double>(survey_data_.size());
    return result;
}

std::vector<RunResult> ScenarioRunner::run_all() const {
    std::vector<RunResult> results;
    results.reserve(scenario_.budgets.size());
    for (Money budget : scenario_.budgets) {
        results.push_back(run_budget(budget));
    }
    return results;
}

} // namespace decarb
