#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "decarb/money.hpp"
#include "decarb/population.hpp"
#include "decarb/retrofit.hpp"

namespace decarb {

// Economic scenario the household uses to evaluate an offer.
struct CostScenario {
    double discount_rate = 0.05;        // fraction/year; "moderate" preset
    int payback_years = 10;             // recovery period T
    double gas_price = 1.160;           // USD/therm
    double electric_price = 0.14072;    // USD/kWh

    void validate() const;
};

// Minimum incentive at which NetBenefit turns non-negative.
struct AcceptanceThreshold {
    std::string household_id;
    Package package = Package::JustHeatPump;
    double w = 0.0;        // USD; exact break-even value
    Money w_cents = 0;     // smallest integer-cent incentive that is accepted
    bool accepts_at_zero = false;

    bool accepts(Money incentive_cents) const { return incentive_cents >= w_cents; }
};

struct EmptyPopulation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BreakEvenRow {
    std::string household_id;
    Package package = Package::JustHeatPump;
    int break_even_year = -1; // smallest T with NetBenefit >= 0; -1 when never within scan range
};

struct BreakEvenReport {
    std::vector<int> horizons;
    std::vector<double> failing_fraction; // aligned with horizons
    std::vector<BreakEvenRow> table;      // sorted by break-even year (never-breakers last)
};

// Discounted energy-bill savings over the payback window minus the install
// cost, plus the incentive. Annual savings are evaluated at the scenario
// prices; residual gas (JustHeatPump keeps the summer appliances) stays on
// the bill.
double net_benefit(const Household& h, const RetrofitOutcome& outcome, const CostScenario& s,
                   double incentive_usd);

AcceptanceThreshold acceptance_threshold(const Household& h, const RetrofitOutcome& outcome,
                                         const CostScenario& s);

// Adds seeded uniform noise of half-width `noise_usd` to a threshold,
// clamped at zero; a zero width leaves the threshold untouched.
AcceptanceThreshold perturb_threshold(const AcceptanceThreshold& t, double noise_usd,
                                      std::uint64_t seed);

// Per-horizon fraction of households that fail to break even with zero
// incentive, plus the sorted per-household break-even table. `outcomes`
// holds, per household, the outcome of each package; the analysis takes the
// best package by zero-incentive NetBenefit (ties to FullReplacement).
BreakEvenReport break_even_analysis(const std::vector<Household>& pop,
                                    const std::vector<std::vector<RetrofitOutcome>>& outcomes,
                                    const CostScenario& s, const std::vector<int>& horizons,
                                    int max_scan_years = 50);

} // namespace decarb
