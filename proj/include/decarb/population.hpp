#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace decarb {

enum class IncomeGroup { Low, Medium, High };

const char* to_string(IncomeGroup g);

// One housing unit's annual energy profile plus the census attributes the
// incentive designer can observe.
struct Household {
    std::string id;
    double annual_gas = 0.0;      // therms/year
    double annual_electric = 0.0; // kWh/year
    double summer_gas = 0.0;      // therms/year, proxy for non-heating gas appliances
    double median_income = 0.0;   // USD/year, census tract value
    IncomeGroup income_group = IncomeGroup::Low;
    double roof_area = 0.0; // m^2

    // Gas attributable to space heating.
    double heating_gas() const { return annual_gas - summer_gas; }
};

// Quintile triple over (income, gas, electric); 125 distinct contexts.
struct Context {
    int income_quintile = 1;   // 1..5
    int gas_quintile = 1;      // 1..5
    int electric_quintile = 1; // 1..5

    int index() const {
        return (income_quintile - 1) * 25 + (gas_quintile - 1) * 5 + (electric_quintile - 1);
    }
};

inline constexpr int kContextCount = 125;

// Parametric marginal used by the synthetic generator. For LogNormal the
// parameters are (mean on the linear scale, sigma of the log); for Normal
// (mean, standard deviation, clamped at zero); for Uniform (low, high).
struct Marginal {
    enum class Family { LogNormal, Normal, Uniform };

    Family family = Family::LogNormal;
    double a = 0.0;
    double b = 0.0;

    double mean() const;
    // Maps a standard normal draw through the marginal (Gaussian copula).
    double from_normal(double z) const;
    void validate(const std::string& name) const;
};

struct PopulationSpec {
    int count = 0;
    std::uint64_t seed = 0;
    Marginal income{Marginal::Family::LogNormal, 52000.0, 0.55};
    Marginal gas{Marginal::Family::LogNormal, 620.0, 0.85};
    Marginal electric{Marginal::Family::LogNormal, 7400.0, 0.55};
    Marginal summer_fraction{Marginal::Family::Uniform, 0.08, 0.30};
    Marginal roof_area{Marginal::Family::Uniform, 18.0, 64.0};
    double income_gas_correlation = 0.35;

    void validate() const; // throws InvalidSpec
};

struct InvalidSpec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PopulationTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV ingestion failure; `row` is the 1-based data row (0 for header issues).
struct IngestError : std::runtime_error {
    enum class Kind { MissingColumn, NonNumericField, NegativeUsage };

    IngestError(Kind k, std::size_t row_number, std::string column_name, const std::string& what);

    Kind kind;
    std::size_t row;
    std::string column;
};

// Maps Household fields to CSV column names; defaults match the canonical
// header (id, gas_therms_yr, electric_kwh_yr, summer_gas_therms_yr,
// median_income_usd, roof_m2).
struct CsvSchema {
    std::string id = "id";
    std::string gas = "gas_therms_yr";
    std::string electric = "electric_kwh_yr";
    std::string summer_gas = "summer_gas_therms_yr";
    std::string income = "median_income_usd";
    std::string roof = "roof_m2";
};

struct QuintileBoundaries {
    // Upper-edge values of quintiles 1..4 for each context variable.
    std::array<double, 4> income{};
    std::array<double, 4> gas{};
    std::array<double, 4> electric{};
};

struct ContextTable {
    std::map<std::string, Context> by_household;
    QuintileBoundaries boundaries;
};

// Reads one Household per data row and assigns income groups by population
// income terciles. Rows violating the usage invariants are rejected.
std::vector<Household> ingest_households(const std::filesystem::path& path,
                                         const CsvSchema& schema = {});

void write_households_csv(const std::filesystem::path& path, const std::vector<Household>& pop,
                          const CsvSchema& schema = {});

// Deterministic synthetic population; income and gas are coupled through a
// Gaussian copula at the spec's correlation.
std::vector<Household> generate_population(const PopulationSpec& spec);

// Rank-based quintile discretization over the full population. Tied values
// all take the bin of the tie group's lowest rank, so duplicates can never
// straddle a boundary.
ContextTable discretize_contexts(const std::vector<Household>& pop);

// Assigns Low/Medium/High by income terciles (same min-rank tie rule).
void assign_income_groups(std::vector<Household>& pop);

// Shared min-rank bucketing helper: stable sort by value, then every member
// of a tie group receives the bucket of the group's first rank.
std::vector<int> rank_buckets(const std::vector<double>& values, int buckets);

} // namespace decarb
