#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "decarb/population.hpp"

namespace decarb {

// The two decarbonization packages. JustHeatPump electrifies space heating
// only; FullReplacement also swaps the remaining gas appliances.
enum class Package { JustHeatPump, FullReplacement };

inline constexpr std::array<Package, 2> kPackages = {Package::JustHeatPump,
                                                     Package::FullReplacement};

const char* to_string(Package p);

// Installed prices after incentives already embedded in the market.
struct EquipmentPrices {
    double solar_per_kw = 2002.0;        // USD/kW
    double battery_per_kwh = 1047.0;     // USD/kWh
    double heatpump_benchmark = 5250.0;  // USD at the median heating-gas household
    double waterheater = 1575.0;         // USD

    void validate() const;
};

// Piecewise-linear ambient-temperature COP model with a hard floor.
struct CopModel {
    double cop_at_reference = 3.0; // dimensionless
    double slope = 0.06;           // per degree C
    double reference_temp = 8.0;   // degrees C
    double floor = 1.5;            // minimum COP

    double at(double temp_c) const;
    void validate() const;
};

// Everything the sizing chain needs beyond the household itself.
struct RetrofitProfiles {
    std::vector<double> solar_shape; // per-day kWh produced per installed kW
    std::vector<double> temperature; // per-day mean air temperature, degrees C
    double area_per_kw = 5.5;        // m^2 of roof per kW of panels
    double daytime_fraction = 0.5;   // share of daily demand coincident with generation
    double appliance_efficiency = 0.9; // gas->electric appliance conversion ratio
    double heating_base_temp = 18.0;   // degrees C; heating need scales with (base - t)+
    bool include_solar = true;

    double annual_yield_per_kw() const; // kWh/kW/year
};

struct RetrofitOutcome {
    std::string household_id;
    Package package = Package::JustHeatPump;
    double g = 0.0;           // therms/year of gas eliminated
    double e_prime = 0.0;     // kWh/year residual grid draw
    double install_cost = 0.0; // USD
    double solar_kw = 0.0;
    double battery_kwh = 0.0;
    double new_demand = 0.0; // kWh/year post-retrofit electric demand (pre-solar)
};

struct HeatPumpSizing {
    double hp_kwh = 0.0;  // kWh/year of heat pump electricity
    double hp_cost = 0.0; // USD
};

struct SolarBatterySizing {
    double solar_kw = 0.0;
    double battery_kwh = 0.0;
    double cost = 0.0; // USD
};

struct EmptyTempProfile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kKwhPerTherm = 29.307;

// Converts the household's heating gas to an equivalent thermal output and
// distributes it over the temperature profile by heating-degree share; the
// benchmark install cost scales with heating gas relative to the population
// median (computed over gas-heating households).
HeatPumpSizing size_heatpump(const Household& h, const CopModel& cop,
                             const std::vector<double>& temp_profile, double median_heating_gas,
                             const EquipmentPrices& prices,
                             double heating_base_temp = 18.0);

// Solar sized to post-retrofit demand subject to the roof; battery sized to
// the maximum daily surplus (generation minus daytime demand).
SolarBatterySizing size_solar_battery(const Household& h, const RetrofitProfiles& profiles,
                                      double post_demand, const EquipmentPrices& prices);

RetrofitOutcome evaluate_retrofit(const Household& h, Package pkg, const CopModel& cop,
                                  const EquipmentPrices& prices, const RetrofitProfiles& profiles,
                                  double median_heating_gas);

// Median heating gas over households that heat with gas (heating_gas > 0);
// zero when no household does.
double median_heating_gas(const std::vector<Household>& pop);

} // namespace decarb
