#include "decarb/carbon.hpp"

#include <charconv>
#include <cmath>

#include "decarb/csvio.hpp"

namespace decarb {

void EmissionsContext::validate() const {
    if (!(grid_intensity >= 0.0) || !(gas_emission_factor >= 0.0)) {
        throw std::invalid_argument("emissions factors must be non-negative");
    }
}

SccSchedule::SccSchedule(std::map<int, double> by_year) : by_year_(std::move(by_year)) {
    if (by_year_.empty()) {
        throw std::invalid_argument("SCC schedule is empty");
    }
    int expected = by_year_.begin()->first;
    for (const auto& [year, value] : by_year_) {
        if (year != expected++) {
            throw std::invalid_argument("SCC schedule must cover contiguous years");
        }
        if (!(value > 0.0)) {
            throw std::invalid_argument("SCC values must be strictly positive");
        }
    }
}

SccSchedule SccSchedule::load_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const auto year_col = table.column("year");
    const auto value_col = table.column("usd_per_ton");
    if (!year_col || !value_col) {
        throw std::runtime_error("SCC table needs columns year, usd_per_ton: " + path.string());
    }
    std::map<int, double> by_year;
    for (const auto& row : table.rows) {
        const int year = std::stoi(row[*year_col]);
        const double value = std::stod(row[*value_col]);
        by_year[year] = value;
    }
    return SccSchedule(std::move(by_year));
}

SccSchedule SccSchedule::constant(double usd_per_ton, int first_year, int last_year) {
    std::map<int, double> by_year;
    for (int y = first_year; y <= last_year; ++y) {
        by_year[y] = usd_per_ton;
    }
    return SccSchedule(std::move(by_year));
}

double SccSchedule::at(int year) const {
    const auto it = by_year_.find(year);
    if (it == by_year_.end()) {
        throw YearOutOfSchedule("year " + std::to_string(year) + " outside SCC schedule [" +
                                std::to_string(first_year()) + ", " +
                                std::to_string(last_year()) + "]");
    }
    return it->second;
}

double annual_reduction(const RetrofitOutcome& outcome, const Household& h,
                        const EmissionsContext& ctx) {
    const double gas_kg = outcome.g * ctx.gas_emission_factor;
    const double electric_kg = (h.annual_electric - outcome.e_prime) * ctx.grid_intensity / 1000.0;
    return (gas_kg + electric_kg) / 1000.0;
}

double monetize(double annual_tons, int year, const SccSchedule& scc) {
    return annual_tons * scc.at(year);
}

double projected_value(double annual_tons, int adopt_year, int horizon_year,
                       const SccSchedule& scc) {
    if (adopt_year > horizon_year) {
        throw std::invalid_argument("adopt_year must not exceed horizon_year");
    }
    double total = 0.0;
    for (int t = adopt_year; t <= horizon_year; ++t) {
        total += annual_tons * scc.at(t);
    }
    return total;
}

double load_grid_trace_mean(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const auto value_col = table.column("gco2eq_per_kwh");
    if (!value_col) {
        throw std::runtime_error("grid trace needs column gco2eq_per_kwh: " + path.string());
    }
    if (table.rows.empty()) {
        throw std::runtime_error("grid trace is empty: " + path.string());
    }
    double sum = 0.0;
    for (const auto& row : table.rows) {
        sum += std::stod(row[*value_col]);
    }
    return sum / static_cast<double>(table.rows.size());
}

} // namespace decarb
