#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "decarb/population.hpp"
#include "decarb/retrofit.hpp"

namespace decarb {

struct EmissionsContext {
    double grid_intensity = 300.0;     // gCO2eq/kWh, annual average of an hourly trace
    double gas_emission_factor = 5.3;  // kgCO2 per therm

    void validate() const;
};

struct YearOutOfSchedule : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Social Cost of Carbon, USD per metric ton, keyed by calendar year.
class SccSchedule {
  public:
    SccSchedule() = default;
    explicit SccSchedule(std::map<int, double> by_year);

    static SccSchedule load_csv(const std::filesystem::path& path);
    static SccSchedule constant(double usd_per_ton, int first_year, int last_year);

    double at(int year) const; // throws YearOutOfSchedule
    int first_year() const { return by_year_.begin()->first; }
    int last_year() const { return by_year_.rbegin()->first; }
    const std::map<int, double>& table() const { return by_year_; }

  private:
    std::map<int, double> by_year_;
};

struct CarbonValue {
    std::string household_id;
    Package package = Package::JustHeatPump;
    double annual_tons = 0.0;      // tCO2/year
    double value_usd = 0.0;        // single-year monetized value
    double projected_value = 0.0;  // multi-year monetized value
};

// Annual carbon reduction in metric tons; negative when the retrofit adds
// more grid draw than the gas it removes.
double annual_reduction(const RetrofitOutcome& outcome, const Household& h,
                        const EmissionsContext& ctx);

// annual_tons * SCC(year).
double monetize(double annual_tons, int year, const SccSchedule& scc);

// Sum of annual_tons * SCC(t) for t in [adopt_year, horizon_year].
double projected_value(double annual_tons, int adopt_year, int horizon_year,
                       const SccSchedule& scc);

// Loads an hourly trace (timestamp, gCO2eq/kWh) and returns its mean.
double load_grid_trace_mean(const std::filesystem::path& path);

} // namespace decarb
