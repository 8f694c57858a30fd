#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decarb/acceptance.hpp"
#include "decarb/allocate.hpp"
#include "decarb/bandit.hpp"
#include "decarb/carbon.hpp"
#include "decarb/money.hpp"
#include "decarb/population.hpp"
#include "decarb/retrofit.hpp"

namespace decarb {

enum class EquityMode { Agnostic, Equity, StrictEquityOverTime, RelaxedEquityOverTime };

const char* to_string(EquityMode mode);

// One experiment configuration; the population is supplied separately so a
// sweep can share it.
struct Scenario {
    CostScenario cost;
    EmissionsContext emissions;
    SccSchedule scc = SccSchedule::constant(190.0, 2020, 2060);
    int scenario_year = 2025;
    std::vector<Money> budgets; // cents, one run per entry
    int survey_n = 1000;
    std::uint64_t seed = 0;
    EquityMode equity_mode = EquityMode::Agnostic;
    EquitySpec equity = EquitySpec::default_quarter_half_quarter();
    int horizon_years = 1; // > 1 engages the over-time solvers
    bool rollover = false;
    int extra_rounds = 1; // follow-up offer rounds at one tier higher
    double acceptance_noise_usd = 0.0;
    ArmConfig arms;
    SurveyOptions survey;
    CopModel cop;
    EquipmentPrices prices;
    RetrofitProfiles profiles;
};

struct YearBreakdown {
    int year = 1; // 1-based offer year
    Money spend = 0;
    std::map<IncomeGroup, Money> group_spend;
    double added_tons = 0.0; // annual tCO2/yr newly adopted this year
    int adopters = 0;
};

struct PolicyOutcome {
    double reduction_tons = 0.0; // annual tCO2/yr across all adopters
    double reduction_pct = 0.0;  // share of no-intervention emissions
    Money objective_cents = 0;   // monetized reduction (projected in multi-year mode)
    Money spend = 0;
    std::map<IncomeGroup, Money> group_spend;
    int adopters = 0;
    std::vector<YearBreakdown> years; // multi-year mode only
};

struct SurveyDiagnostics {
    int n = 0;
    std::size_t observed_cells = 0; // (arm, context) cells with at least one response
    double positive_reward_rate = 0.0;
};

struct RunResult {
    Money budget = 0;
    double baseline_tons = 0.0; // no-intervention emissions, tCO2/yr
    PolicyOutcome status_quo;
    PolicyOutcome bandit;
    PolicyOutcome optimal;
    SurveyDiagnostics survey;
};

// Runs the staged pipeline: retrofit sizing, carbon valuation, acceptance
// thresholds, one survey + fit shared by every budget, then the three
// policies per budget.
class ScenarioRunner {
  public:
    ScenarioRunner(Scenario scenario, std::vector<Household> population);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<Household>& population() const { return population_; }
    double baseline_tons() const { return baseline_tons_; }

    RunResult run_budget(Money budget) const;
    std::vector<RunResult> run_all() const; // one result per configured budget

    // Redraws the survey and refits the estimator, leaving every earlier
    // stage untouched; used by the survey-size diagnostic.
    void resurvey(int n, std::uint64_t survey_seed);

    PolicyOutcome run_status_quo() const;
    PolicyOutcome run_optimal(Money budget) const;
    PolicyOutcome run_bandit(Money budget) const;

    // Stage accessors, mainly for tests and diagnostics.
    const std::vector<int>& context_of() const { return context_of_; }
    const std::vector<Arm>& arms() const { return arms_; }
    const LcbEstimator& estimator() const { return estimator_; }
    const std::vector<SurveyResponse>& survey_data() const { return survey_data_; }
    const std::vector<int>& best_arm_by_context() const { return best_arm_; }
    const AcceptanceThreshold& threshold(std::size_t household, Package pkg) const {
        return thresholds_[household][static_cast<std::size_t>(package_index(pkg))];
    }
    Money value_cents(std::size_t household, Package pkg) const {
        return value_cents_[household][static_cast<std::size_t>(package_index(pkg))];
    }
    double annual_tons(std::size_t household, Package pkg) const {
        return tons_[household][static_cast<std::size_t>(package_index(pkg))];
    }
    const std::vector<std::vector<RetrofitOutcome>>& outcomes() const { return outcomes_; }

  private:
    void prepare();
    int best_value_package(std::size_t i) const; // ties to FullReplacement
    std::optional<int> best_free_package(std::size_t i) const;
    Money projected_cents(std::size_t i, int pkg, int offer_year) const;

    Scenario scenario_;
    std::vector<Household> population_;
    std::vector<int> context_of_;
    std::vector<std::vector<RetrofitOutcome>> outcomes_;        // [household][package]
    std::vector<std::array<double, 2>> tons_;                   // annual reduction, tons
    std::vector<std::array<Money, 2>> value_cents_;             // monetized, scenario year
    std::vector<std::array<AcceptanceThreshold, 2>> thresholds_;
    std::vector<std::array<Money, 2>> threshold_cents_;
    double baseline_tons_ = 0.0;
    double median_heating_gas_ = 0.0;
    std::array<std::vector<double>, 2> reduction_table_;
    std::vector<Arm> arms_;
    std::vector<SurveyResponse> survey_data_;
    LcbEstimator estimator_;
    std::vector<int> best_arm_;
};

} // namespace decarb
