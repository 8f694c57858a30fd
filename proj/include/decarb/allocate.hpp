#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "decarb/money.hpp"
#include "decarb/population.hpp"

namespace decarb {

// One candidate incentive: monetized carbon reduction against the minimum
// incentive the household would accept. Negative values are legal inputs
// but never selected.
struct KnapsackItem {
    std::string id;
    Money value = 0;  // cents
    Money weight = 0; // cents, >= 0
    IncomeGroup group = IncomeGroup::Low;
};

struct UnknownGroup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Budget shares per socioeconomic group; shares sum to 1.
struct EquitySpec {
    std::vector<std::pair<IncomeGroup, double>> shares;

    static EquitySpec default_quarter_half_quarter();
    void validate() const;
    bool contains(IncomeGroup g) const;
    // Integer-cent split: floors plus largest-remainder distribution, so the
    // shares sum back to the budget exactly.
    std::map<IncomeGroup, Money> split(Money budget) const;
};

struct AllocationPlan {
    std::vector<std::string> selected;       // ids, sorted
    std::map<std::string, Money> incentives; // id -> cents, only selected ids
    Money total_spend = 0;
    Money total_value = 0;
    std::map<IncomeGroup, Money> per_group_spend;
};

// values(id, year) -> projected value in cents for adopting in that year.
using YearValueFn = std::function<Money(const std::string&, int)>;

struct MultiYearOptions {
    bool rollover = false; // carry unspent yearly budget forward
    // Called after each year's solve; may rewrite the remaining pool.
    std::function<void(int year, const AllocationPlan&, std::vector<KnapsackItem>&)> refresh;
};

enum class EquityOverTime { Strict, Relaxed };

// Exact 0/1 knapsack: maximizes total value subject to total weight <= budget.
// Zero-weight positive-value items are always selected; non-positive values
// are filtered out before solving.
AllocationPlan solve_knapsack(const std::vector<KnapsackItem>& items, Money budget);

// Eq-share budgets per group solved as independent knapsacks.
AllocationPlan solve_equity_knapsack(const std::vector<KnapsackItem>& items, Money budget,
                                     const EquitySpec& eq);

// Exact solve under a total budget plus per-group spending caps (used by the
// relaxed over-time constraint and directly by callers that track remaining
// group budgets).
AllocationPlan solve_capped_knapsack(const std::vector<KnapsackItem>& items, Money budget,
                                     const std::map<IncomeGroup, Money>& group_caps);

// Year-by-year allocation: each year solves over the not-yet-adopted pool
// with budget floor(B/Y) and that year's projected values; adopters leave
// the pool.
std::vector<AllocationPlan> solve_multiyear(const std::vector<KnapsackItem>& items, Money budget,
                                            int years, const YearValueFn& values,
                                            const MultiYearOptions& opts = {});

// Strict: every year splits its budget across groups. Relaxed: yearly total
// budget plus cumulative per-group caps over the whole horizon.
std::vector<AllocationPlan> solve_multiyear_equity(const std::vector<KnapsackItem>& items,
                                                   Money budget, int years, const EquitySpec& eq,
                                                   EquityOverTime mode, const YearValueFn& values,
                                                   const MultiYearOptions& opts = {});

std::string plan_to_json(const AllocationPlan& plan);

} // namespace decarb
