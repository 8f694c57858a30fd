#include "decarb/acceptance.hpp"

#include <algorithm>
#include <cmath>

#include "decarb/rng.hpp"

namespace decarb {

void CostScenario::validate() const {
    if (!(discount_rate > -1.0)) {
        throw std::invalid_argument("discount_rate must exceed -1");
    }
    if (payback_years < 1) {
        throw std::invalid_argument("payback_years must be at least 1");
    }
    if (!(gas_price > 0.0 && electric_price > 0.0)) {
        throw std::invalid_argument("energy prices must be strictly positive");
    }
}

namespace {

double annual_saving(const Household& h, const RetrofitOutcome& outcome, const CostScenario& s) {
    const double pre = h.annual_gas * s.gas_price + h.annual_electric * s.electric_price;
    const double residual_gas = std::max(0.0, h.annual_gas - outcome.g);
    const double post = outcome.e_prime * s.electric_price + residual_gas * s.gas_price;
    return pre - post;
}

double annuity_factor(double rate, int years) {
    // sum_{t=0}^{T} (1+r)^-t, evaluated term by term.
    double factor = 0.0;
    double discount = 1.0;
    for (int t = 0; t <= years; ++t) {
        factor += discount;
        discount /= 1.0 + rate;
    }
    return factor;
}

} // namespace

double net_benefit(const Household& h, const RetrofitOutcome& outcome, const CostScenario& s,
                   double incentive_usd) {
    return annual_saving(h, outcome, s) * annuity_factor(s.discount_rate, s.payback_years) -
           outcome.install_cost + incentive_usd;
}

AcceptanceThreshold acceptance_threshold(const Household& h, const RetrofitOutcome& outcome,
                                         const CostScenario& s) {
    AcceptanceThreshold t;
    t.household_id = h.id;
    t.package = outcome.package;
    t.w = std::max(0.0, -net_benefit(h, outcome, s, 0.0));
    t.w_cents = static_cast<Money>(std::ceil(t.w * 100.0 - 1e-9));
    if (t.w_cents < 0) {
        t.w_cents = 0;
    }
    t.accepts_at_zero = t.w_cents == 0;
    return t;
}

AcceptanceThreshold perturb_threshold(const AcceptanceThreshold& t, double noise_usd,
                                      std::uint64_t seed) {
    if (noise_usd <= 0.0) {
        return t;
    }
    Rng rng(seed);
    AcceptanceThreshold out = t;
    out.w = std::max(0.0, t.w + rng.uniform(-noise_usd, noise_usd));
    out.w_cents = static_cast<Money>(std::ceil(out.w * 100.0 - 1e-9));
    if (out.w_cents < 0) {
        out.w_cents = 0;
    }
    out.accepts_at_zero = out.w_cents == 0;
    return out;
}

BreakEvenReport break_even_analysis(const std::vector<Household>& pop,
                                    const std::vector<std::vector<RetrofitOutcome>>& outcomes,
                                    const CostScenario& s, const std::vector<int>& horizons,
                                    int max_scan_years) {
    if (pop.empty()) {
        throw EmptyPopulation("break-even analysis over an empty population");
    }
    if (outcomes.size() != pop.size()) {
        throw std::invalid_argument("outcomes must align with the population");
    }

    BreakEvenReport report;
    report.horizons = horizons;
    report.failing_fraction.assign(horizons.size(), 0.0);
    report.table.reserve(pop.size());

    for (std::size_t i = 0; i < pop.size(); ++i) {
        const Household& h = pop[i];
        if (outcomes[i].empty()) {
            throw std::invalid_argument("household " + h.id + " has no retrofit outcomes");
        }
        // Best package by zero-incentive NetBenefit; ties to FullReplacement.
        const RetrofitOutcome* best = &outcomes[i].front();
        CostScenario probe = s;
        double best_nb = net_benefit(h, *best, probe, 0.0);
        for (const auto& candidate : outcomes[i]) {
            const double nb = net_benefit(h, candidate, probe, 0.0);
            if (nb > best_nb ||
                (nb == best_nb && candidate.package == Package::FullReplacement &&
                 best->package != Package::FullReplacement)) {
                best = &candidate;
                best_nb = nb;
            }
        }

        for (std::size_t k = 0; k < horizons.size(); ++k) {
            probe.payback_years = horizons[k];
            if (net_benefit(h, *best, probe, 0.0) < 0.0) {
                report.failing_fraction[k] += 1.0;
            }
        }

        BreakEvenRow row;
        row.household_id = h.id;
        row.package = best->package;
        for (int t = 1; t <= max_scan_years; ++t) {
            probe.payback_years = t;
            if (net_benefit(h, *best, probe, 0.0) >= 0.0) {
                row.break_even_year = t;
                break;
            }
        }
        report.table.push_back(std::move(row));
    }

    for (double& fraction : report.failing_fraction) {
        fraction /= static_cast<double>(pop.size());
    }

    std::sort(report.table.begin(), report.table.end(),
              [](const BreakEvenRow& a, const BreakEvenRow& b) {
                  const int ya = a.break_even_year < 0 ? std::numeric_limits<int>::max()
                                                       : a.break_even_year;
                  const int yb = b.break_even_year < 0 ? std::numeric_limits<int>::max()
                                                       : b.break_even_year;
                  if (ya != yb) {
                      return ya < yb;
                  }
                  return a.household_id < b.household_id;
              });
    return report;
}

} // namespace decarb
