#include "decarb/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "decarb/csvio.hpp"
#include "decarb/rng.hpp"

namespace decarb {

const char* to_string(IncomeGroup g) {
    switch (g) {
    case IncomeGroup::Low:
        return "low";
    case IncomeGroup::Medium:
        return "medium";
    case IncomeGroup::High:
        return "high";
    }
    return "unknown";
}

double Marginal::mean() const {
    switch (family) {
    case Family::LogNormal:
    case Family::Normal:
        return a;
    case Family::Uniform:
        return 0.5 * (a + b);
    }
    return 0.0;
}

double Marginal::from_normal(double z) const {
    switch (family) {
    case Family::LogNormal:
        // exp(mu + sigma z) with mu chosen so the linear-scale mean is `a`.
        return a * std::exp(b * z - 0.5 * b * b);
    case Family::Normal:
        return std::max(0.0, a + b * z);
    case Family::Uniform: {
        const double u = 0.5 * std::erfc(-z / std::sqrt(2.0));
        return a + (b - a) * u;
    }
    }
    return 0.0;
}

void Marginal::validate(const std::string& name) const {
    switch (family) {
    case Family::LogNormal:
        if (!(a > 0.0) || !(b > 0.0)) {
            throw InvalidSpec(name + ": lognormal requires mean > 0 and sigma > 0");
        }
        break;
    case Family::Normal:
        if (!(a > 0.0) || !(b > 0.0)) {
            throw InvalidSpec(name + ": normal requires mean > 0 and sd > 0");
        }
        break;
    case Family::Uniform:
        if (!(a >= 0.0) || !(b > a)) {
            throw InvalidSpec(name + ": uniform requires 0 <= low < high");
        }
        break;
    }
}

void PopulationSpec::validate() const {
    if (count <= 0) {
        throw InvalidSpec("population count must be > 0");
    }
    if (!(income_gas_correlation >= -1.0 && income_gas_correlation <= 1.0)) {
        throw InvalidSpec("income/gas correlation must lie in [-1, 1]");
    }
    income.validate("income");
    gas.validate("gas");
    electric.validate("electric");
    summer_fraction.validate("summer_fraction");
    roof_area.validate("roof_area");
    if (summer_fraction.family == Marginal::Family::Uniform &&
        !(summer_fraction.b <= 1.0)) {
        throw InvalidSpec("summer_fraction must stay within [0, 1]");
    }
}

IngestError::IngestError(Kind k, std::size_t row_number, std::string column_name,
                         const std::string& what)
    : std::runtime_error(what), kind(k), row(row_number), column(std::move(column_name)) {}

namespace {

IngestError missing_column(const std::string& column) {
    return {IngestError::Kind::MissingColumn, 0, column, "missing required column '" + column + "'"};
}

double parse_field(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw IngestError(IngestError::Kind::NonNumericField, row, column,
                          "row " + std::to_string(row) + ": column '" + column +
                              "' is not numeric: '" + text + "'");
    }
    return value;
}

void require_non_negative(double value, std::size_t row, const std::string& column) {
    if (value < 0.0) {
        throw IngestError(IngestError::Kind::NegativeUsage, row, column,
                          "row " + std::to_string(row) + ": column '" + column +
                              "' must be non-negative");
    }
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

} // namespace

std::vector<Household> ingest_households(const std::filesystem::path& path,
                                         const CsvSchema& schema) {
    const CsvTable table = read_csv(path);

    const std::array<const std::string*, 6> names = {&schema.id,     &schema.gas,
                                                     &schema.electric, &schema.summer_gas,
                                                     &schema.income, &schema.roof};
    std::array<std::size_t, 6> cols{};
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto col = table.column(*names[i]);
        if (!col) {
            throw missing_column(*names[i]);
        }
        cols[i] = *col;
    }

    std::vector<Household> pop;
    pop.reserve(table.rows.size());
    std::size_t row_number = 0;
    for (const auto& row : table.rows) {
        ++row_number;
        if (row.size() <= *std::max_element(cols.begin(), cols.end())) {
            throw IngestError(IngestError::Kind::NonNumericField, row_number, "",
                              "row " + std::to_string(row_number) + ": too few fields");
        }
        Household h;
        h.id = row[cols[0]];
        h.annual_gas = parse_field(row[cols[1]], row_number, schema.gas);
        h.annual_electric = parse_field(row[cols[2]], row_number, schema.electric);
        h.summer_gas = parse_field(row[cols[3]], row_number, schema.summer_gas);
        h.median_income = parse_field(row[cols[4]], row_number, schema.income);
        h.roof_area = parse_field(row[cols[5]], row_number, schema.roof);

        require_non_negative(h.annual_gas, row_number, schema.gas);
        require_non_negative(h.annual_electric, row_number, schema.electric);
        require_non_negative(h.summer_gas, row_number, schema.summer_gas);
        require_non_negative(h.roof_area, row_number, schema.roof);
        if (h.summer_gas > h.annual_gas) {
            throw IngestError(IngestError::Kind::NegativeUsage, row_number, schema.summer_gas,
                              "row " + std::to_string(row_number) +
                                  ": summer gas exceeds annual gas");
        }
        pop.push_back(std::move(h));
    }

    assign_income_groups(pop);
    return pop;
}

void write_households_csv(const std::filesystem::path& path, const std::vector<Household>& pop,
                          const CsvSchema& schema) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << join_csv({schema.id, schema.gas, schema.electric, schema.summer_gas, schema.income,
                     schema.roof})
        << '\n';
    for (const auto& h : pop) {
        out << join_csv({h.id, format_double(h.annual_gas), format_double(h.annual_electric),
                         format_double(h.summer_gas), format_double(h.median_income),
                         format_double(h.roof_area)})
            << '\n';
    }
}

std::vector<Household> generate_population(const PopulationSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const double rho = spec.income_gas_correlation;
    const double rho_tail = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    const int digits = std::max<int>(4, static_cast<int>(std::to_string(spec.count).size()));
    std::vector<Household> pop;
    pop.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        const double z_income = rng.normal();
        const double z_gas = rho * z_income + rho_tail * rng.normal();
        const double z_electric = rng.normal();
        const double z_summer = rng.normal();
        const double z_roof = rng.normal();

        Household h;
        std::string index = std::to_string(i + 1);
        h.id = "h" + std::string(static_cast<std::size_t>(digits) - index.size(), '0') + index;
        h.median_income = spec.income.from_normal(z_income);
        h.annual_gas = spec.gas.from_normal(z_gas);
        h.annual_electric = spec.electric.from_normal(z_electric);
        const double fraction = std::clamp(spec.summer_fraction.from_normal(z_summer), 0.0, 1.0);
        h.summer_gas = fraction * h.annual_gas;
        h.roof_area = spec.roof_area.from_normal(z_roof);
        pop.push_back(std::move(h));
    }

    assign_income_groups(pop);
    return pop;
}

std::vector<int> rank_buckets(const std::vector<double>& values, int buckets) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<int> out(n, 0);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && values[order[stop]] == values[order[start]]) {
            ++stop;
        }
        const int bucket = static_cast<int>(
            std::min<std::size_t>(static_cast<std::size_t>(buckets) - 1,
                                  start * static_cast<std::size_t>(buckets) / n));
        for (std::size_t i = start; i < stop; ++i) {
            out[order[i]] = bucket;
        }
        start = stop;
    }
    return out;
}

void assign_income_groups(std::vector<Household>& pop) {
    if (pop.empty()) {
        return;
    }
    std::vector<double> incomes(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        incomes[i] = pop[i].median_income;
    }
    const auto buckets = rank_buckets(incomes, 3);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].income_group = static_cast<IncomeGroup>(buckets[i]);
    }
}

ContextTable discretize_contexts(const std::vector<Household>& pop) {
    if (pop.size() < 5) {
        throw PopulationTooSmall("context discretization needs at least 5 households, got " +
                                 std::to_string(pop.size()));
    }

    std::vector<double> income(pop.size()), gas(pop.size()), electric(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        income[i] = pop[i].median_income;
        gas[i] = pop[i].annual_gas;
        electric[i] = pop[i].annual_electric;
    }

    const auto iq = rank_buckets(income, 5);
    const auto gq = rank_buckets(gas, 5);
    const auto eq = rank_buckets(electric, 5);

    ContextTable table;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        Context c;
        c.income_quintile = iq[i] + 1;
        c.gas_quintile = gq[i] + 1;
        c.electric_quintile = eq[i] + 1;
        table.by_household.emplace(pop[i].id, c);
    }

    auto boundaries_of = [](const std::vector<double>& values,
                            const std::vector<int>& bucket) -> std::array<double, 4> {
        std::array<double, 4> edges{};
        for (int q = 0; q < 4; ++q) {
            double edge = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (bucket[i] == q) {
                    edge = std::max(edge, values[i]);
                }
            }
            edges[static_cast<std::size_t>(q)] = edge;
        }
        return edges;
    };
    table.boundaries.income = boundaries_of(income, iq);
    table.boundaries.gas = boundaries_of(gas, gq);
    table.boundaries.electric = boundaries_of(electric, eq);
    return table;
}

} // namespace decarb
