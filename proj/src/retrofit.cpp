#include "decarb/retrofit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace decarb {

const char* to_string(Package p) {
    return p == Package::JustHeatPump ? "just_heat_pump" : "full_replacement";
}

void EquipmentPrices::validate() const {
    if (!(solar_per_kw > 0.0 && battery_per_kwh > 0.0 && heatpump_benchmark > 0.0 &&
          waterheater > 0.0)) {
        throw std::invalid_argument("equipment prices must be strictly positive");
    }
}

double CopModel::at(double temp_c) const {
    return std::max(floor, cop_at_reference + slope * (temp_c - reference_temp));
}

void CopModel::validate() const {
    if (!(cop_at_reference > 1.0)) {
        throw std::invalid_argument("cop_at_reference must exceed 1");
    }
    if (!(floor >= 1.0)) {
        throw std::invalid_argument("COP floor must be at least 1");
    }
}

double RetrofitProfiles::annual_yield_per_kw() const {
    return std::accumulate(solar_shape.begin(), solar_shape.end(), 0.0);
}

HeatPumpSizing size_heatpump(const Household& h, const CopModel& cop,
                             const std::vector<double>& temp_profile, double median_heating_gas,
                             const EquipmentPrices& prices, double heating_base_temp) {
    if (temp_profile.empty()) {
        throw EmptyTempProfile("temperature profile is empty");
    }
    const double heating_gas = std::max(0.0, h.heating_gas());
    HeatPumpSizing sizing;
    if (heating_gas <= 0.0) {
        return sizing; // nothing to replace
    }

    // Heating need per bin scales with degrees below the base temperature;
    // an all-warm profile degenerates to uniform shares.
    std::vector<double> weight(temp_profile.size());
    double total_weight = 0.0;
    for (std::size_t i = 0; i < temp_profile.size(); ++i) {
        weight[i] = std::max(0.0, heating_base_temp - temp_profile[i]);
        total_weight += weight[i];
    }
    if (total_weight <= 0.0) {
        std::fill(weight.begin(), weight.end(), 1.0);
        total_weight = static_cast<double>(weight.size());
    }

    const double thermal_kwh = heating_gas * kKwhPerTherm;
    double kwh = 0.0;
    for (std::size_t i = 0; i < temp_profile.size(); ++i) {
        if (weight[i] > 0.0) {
            kwh += thermal_kwh * (weight[i] / total_weight) / cop.at(temp_profile[i]);
        }
    }
    sizing.hp_kwh = kwh;
    sizing.hp_cost =
        median_heating_gas > 0.0 ? prices.heatpump_benchmark * (heating_gas / median_heating_gas)
                                 : prices.heatpump_benchmark;
    return sizing;
}

SolarBatterySizing size_solar_battery(const Household& h, const RetrofitProfiles& profiles,
                                      double post_demand, const EquipmentPrices& prices) {
    SolarBatterySizing sizing;
    const double yield = profiles.annual_yield_per_kw();
    if (post_demand <= 0.0 || h.roof_area <= 0.0 || yield <= 0.0 ||
        profiles.solar_shape.empty()) {
        return sizing;
    }
    sizing.solar_kw = std::min(post_demand / yield, h.roof_area / profiles.area_per_kw);

    const double days = static_cast<double>(profiles.solar_shape.size());
    const double daytime_demand = profiles.daytime_fraction * post_demand / days;
    double max_surplus = 0.0;
    for (double shape : profiles.solar_shape) {
        max_surplus = std::max(max_surplus, sizing.solar_kw * shape - daytime_demand);
    }
    sizing.battery_kwh = max_surplus;
    sizing.cost =
        sizing.solar_kw * prices.solar_per_kw + sizing.battery_kwh * prices.battery_per_kwh;
    return sizing;
}

RetrofitOutcome evaluate_retrofit(const Household& h, Package pkg, const CopModel& cop,
                                  const EquipmentPrices& prices, const RetrofitProfiles& profiles,
                                  double median_heating_gas) {
    const HeatPumpSizing hp = size_heatpump(h, cop, profiles.temperature, median_heating_gas,
                                            prices, profiles.heating_base_temp);

    const double appliance_kwh = pkg == Package::FullReplacement
                                     ? h.summer_gas * kKwhPerTherm * profiles.appliance_efficiency
                                     : 0.0;
    const double new_demand = h.annual_electric + hp.hp_kwh + appliance_kwh;

    SolarBatterySizing sb;
    double self_consumed = 0.0;
    if (profiles.include_solar) {
        sb = size_solar_battery(h, profiles, new_demand, prices);
        if (sb.solar_kw > 0.0) {
            const double days = static_cast<double>(profiles.solar_shape.size());
            const double daily_demand = new_demand / days;
            const double day_use = profiles.daytime_fraction * daily_demand;
            const double night_use = daily_demand - day_use;
            for (double shape : profiles.solar_shape) {
                const double generation = sb.solar_kw * shape;
                const double direct = std::min(generation, day_use);
                const double stored = std::min(std::max(0.0, generation - day_use), sb.battery_kwh);
                self_consumed += direct + std::min(stored, night_use);
            }
        }
    }

    RetrofitOutcome out;
    out.household_id = h.id;
    out.package = pkg;
    out.g = pkg == Package::FullReplacement ? h.annual_gas : std::max(0.0, h.heating_gas());
    out.new_demand = new_demand;
    out.e_prime = std::max(0.0, new_demand - self_consumed);
    out.solar_kw = sb.solar_kw;
    out.battery_kwh = sb.battery_kwh;
    out.install_cost =
        hp.hp_cost + sb.cost + (pkg == Package::FullReplacement ? prices.waterheater : 0.0);
    return out;
}

double median_heating_gas(const std::vector<Household>& pop) {
    std::vector<double> heating;
    heating.reserve(pop.size());
    for (const auto& h : pop) {
        if (h.heating_gas() > 0.0) {
            heating.push_back(h.heating_gas());
        }
    }
    if (heating.empty()) {
        return 0.0;
    }
    std::sort(heating.begin(), heating.end());
    const std::size_t n = heating.size();
    return n % 2 == 1 ? heating[n / 2] : 0.5 * (heating[n / 2 - 1] + heating[n / 2]);
}

} // namespace decarb
