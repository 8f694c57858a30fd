#include "decarb/allocate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace decarb {

EquitySpec EquitySpec::default_quarter_half_quarter() {
    return {{{IncomeGroup::Low, 0.25}, {IncomeGroup::Medium, 0.50}, {IncomeGroup::High, 0.25}}};
}

void EquitySpec::validate() const {
    if (shares.empty()) {
        throw std::invalid_argument("equity spec has no groups");
    }
    double sum = 0.0;
    for (const auto& [group, share] : shares) {
        if (share < 0.0) {
            throw std::invalid_argument("equity shares must be non-negative");
        }
        sum += share;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("equity shares must sum to 1");
    }
}

bool EquitySpec::contains(IncomeGroup g) const {
    return std::any_of(shares.begin(), shares.end(),
                       [g](const auto& entry) { return entry.first == g; });
}

std::map<IncomeGroup, Money> EquitySpec::split(Money budget) const {
    validate();
    std::map<IncomeGroup, Money> out;
    std::vector<std::pair<double, IncomeGroup>> remainders;
    Money assigned = 0;
    for (const auto& [group, share] : shares) {
        const double exact = share * static_cast<double>(budget);
        const Money floored = static_cast<Money>(std::floor(exact + 1e-9));
        out[group] = floored;
        assigned += floored;
        remainders.emplace_back(exact - static_cast<double>(floored), group);
    }
    // Leftover cents go to the largest remainders; ties keep the listed order.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    Money leftover = budget - assigned;
    for (std::size_t i = 0; leftover > 0 && i < remainders.size(); ++i, --leftover) {
        out[remainders[i].second] += 1;
    }
    return out;
}

namespace {

struct SolverItem {
    std::size_t original = 0; // index into the caller's item vector
    Money value = 0;
    Money weight = 0;
    IncomeGroup group = IncomeGroup::Low;
};

// Exact branch and bound over efficiency-sorted items with a Dantzig-style
// fractional upper bound; all searchable items have value > 0 and weight > 0.
// With group caps the node bound is the tighter of the total-budget bound
// and the sum of per-group bounds.
class BranchAndBound {
  public:
    BranchAndBound(std::vector<SolverItem> items, Money budget,
                   const std::map<IncomeGroup, Money>* group_caps)
        : items_(std::move(items)), budget_(budget), use_groups_(group_caps != nullptr) {
        std::sort(items_.begin(), items_.end(), [](const SolverItem& a, const SolverItem& b) {
            const __int128 lhs = static_cast<__int128>(a.value) * b.weight;
            const __int128 rhs = static_cast<__int128>(b.value) * a.weight;
            if (lhs != rhs) {
                return lhs > rhs; // value/weight descending, exact compare
            }
            if (a.weight != b.weight) {
                return a.weight < b.weight;
            }
            return a.original < b.original;
        });
        const std::size_t n = items_.size();
        prefix_value_.assign(n + 1, 0);
        prefix_weight_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            prefix_value_[i + 1] = prefix_value_[i] + items_[i].value;
            prefix_weight_[i + 1] = prefix_weight_[i] + items_[i].weight;
        }
        if (use_groups_) {
            for (const auto& [group, cap] : *group_caps) {
                group_cap_[static_cast<std::size_t>(group)] = cap;
            }
            for (std::size_t i = 0; i < n; ++i) {
                GroupView& view = views_[static_cast<std::size_t>(items_[i].group)];
                view.positions.push_back(i);
                view.prefix_value.push_back(view.prefix_value.back() + items_[i].value);
                view.prefix_weight.push_back(view.prefix_weight.back() + items_[i].weight);
            }
        }
        chosen_.reserve(n);
    }

    void run() {
        greedy_incumbent();
        dfs(0, budget_, 0, 0);
    }

    std::vector<std::size_t> best_originals() const {
        std::vector<std::size_t> out;
        out.reserve(best_set_.size());
        for (std::size_t pos : best_set_) {
            out.push_back(items_[pos].original);
        }
        return out;
    }

  private:
    struct GroupView {
        std::vector<std::size_t> positions;
        std::vector<Money> prefix_value{0};
        std::vector<Money> prefix_weight{0};
    };

    Money group_remaining(IncomeGroup g) const {
        const auto gi = static_cast<std::size_t>(g);
        return group_cap_[gi] - group_spend_[gi];
    }

    // Fractional upper bound over local positions [idx, n) against cap; the
    // prefix arrays and accessors describe the (sub)sequence scanned.
    template <typename WeightAt, typename ValueAt>
    Money dantzig(const std::vector<Money>& pv, const std::vector<Money>& pw, std::size_t idx,
                  Money cap, WeightAt weight_at, ValueAt value_at) const {
        const std::size_t n = pv.size() - 1;
        if (idx >= n || cap <= 0) {
            return 0;
        }
        const Money target = pw[idx] + cap;
        const auto it = std::upper_bound(pw.begin() + static_cast<std::ptrdiff_t>(idx),
                                         pw.end(), target);
        const std::size_t j = static_cast<std::size_t>(it - pw.begin()) - 1;
        Money bound = pv[j] - pv[idx];
        if (j < n) {
            const Money slack = cap - (pw[j] - pw[idx]);
            if (slack > 0) {
                bound += static_cast<Money>(static_cast<__int128>(value_at(j)) * slack /
                                            weight_at(j));
            }
        }
        return bound;
    }

    Money node_bound(std::size_t idx, Money cap) const {
        const Money total = dantzig(
            prefix_value_, prefix_weight_, idx, cap,
            [this](std::size_t j) { return items_[j].weight; },
            [this](std::size_t j) { return items_[j].value; });
        if (!use_groups_) {
            return total;
        }
        Money by_group = 0;
        for (std::size_t gi = 0; gi < views_.size(); ++gi) {
            const GroupView& view = views_[gi];
            if (view.positions.empty()) {
                continue;
            }
            const auto start = std::lower_bound(view.positions.begin(), view.positions.end(), idx);
            const std::size_t local = static_cast<std::size_t>(start - view.positions.begin());
            const Money remaining = group_cap_[gi] - group_spend_[gi];
            by_group += dantzig(
                view.prefix_value, view.prefix_weight, local, std::min(remaining, cap),
                [this, &view](std::size_t j) { return items_[view.positions[j]].weight; },
                [this, &view](std::size_t j) { return items_[view.positions[j]].value; });
        }
        return std::min(total, by_group);
    }

    void greedy_incumbent() {
        Money cap = budget_;
        Money value = 0;
        Money spend = 0;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (items_[i].weight > cap) {
                continue;
            }
            if (use_groups_ && items_[i].weight > group_remaining(items_[i].group)) {
                continue;
            }
            chosen_.push_back(i);
            cap -= items_[i].weight;
            spend += items_[i].weight;
            value += items_[i].value;
            group_spend_[static_cast<std::size_t>(items_[i].group)] += items_[i].weight;
        }
        consider_candidate(value, spend);
        for (std::size_t i : chosen_) {
            group_spend_[static_cast<std::size_t>(items_[i].group)] -= items_[i].weight;
        }
        chosen_.clear();
    }

    void consider_candidate(Money value, Money spend) {
        if (best_value_ < 0 || value > best_value_ ||
            (value == best_value_ &&
             (spend < best_spend_ || (spend == best_spend_ && lex_smaller(chosen_, best_set_))))) {
            best_value_ = value;
            best_spend_ = spend;
            best_set_ = chosen_;
        }
    }

    bool lex_smaller(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
        auto sorted_originals = [this](const std::vector<std::size_t>& positions) {
            std::vector<std::size_t> keys;
            keys.reserve(positions.size());
            for (std::size_t p : positions) {
                keys.push_back(items_[p].original);
            }
            std::sort(keys.begin(), keys.end());
            return keys;
        };
        const auto ka = sorted_originals(a);
        const auto kb = sorted_originals(b);
        return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
    }

    void dfs(std::size_t idx, Money cap, Money value, Money spend) {
        if (value + node_bound(idx, cap) <= best_value_) {
            return; // cannot strictly improve the incumbent value
        }
        if (idx == items_.size()) {
            consider_candidate(value, spend);
            return;
        }
        const SolverItem& item = items_[idx];
        if (item.weight <= cap &&
            (!use_groups_ || item.weight <= group_remaining(item.group))) {
            chosen_.push_back(idx);
            group_spend_[static_cast<std::size_t>(item.group)] += item.weight;
            dfs(idx + 1, cap - item.weight, value + item.value, spend + item.weight);
            group_spend_[static_cast<std::size_t>(item.group)] -= item.weight;
            chosen_.pop_back();
        }
        dfs(idx + 1, cap, value, spend);
    }

    std::vector<SolverItem> items_;
    Money budget_;
    bool use_groups_;
    std::array<Money, 3> group_cap_{std::numeric_limits<Money>::max(),
                                    std::numeric_limits<Money>::max(),
                                    std::numeric_limits<Money>::max()};
    std::array<Money, 3> group_spend_{0, 0, 0};
    std::array<GroupView, 3> views_{};
    std::vector<Money> prefix_value_;
    std::vector<Money> prefix_weight_;
    std::vector<std::size_t> chosen_;
    std::vector<std::size_t> best_set_;
    Money best_value_ = -1;
    Money best_spend_ = 0;
};

AllocationPlan assemble_plan(const std::vector<KnapsackItem>& items,
                             const std::vector<std::size_t>& picked) {
    AllocationPlan plan;
    for (std::size_t i : picked) {
        const KnapsackItem& item = items[i];
        plan.selected.push_back(item.id);
        plan.incentives[item.id] = item.weight;
        plan.total_spend += item.weight;
        plan.total_value += item.value;
        plan.per_group_spend[item.group] += item.weight;
    }
    std::sort(plan.selected.begin(), plan.selected.end());
    return plan;
}

void check_inputs(const std::vector<KnapsackItem>& items, Money budget) {
    if (budget < 0) {
        throw std::invalid_argument("budget must be non-negative");
    }
    for (const auto& item : items) {
        if (item.weight < 0) {
            throw std::invalid_argument("knapsack weight must be non-negative: " + item.id);
        }
    }
}

AllocationPlan solve_with_caps(const std::vector<KnapsackItem>& items, Money budget,
                               const std::map<IncomeGroup, Money>* group_caps) {
    check_inputs(items, budget);
    if (group_caps) {
        for (const auto& item : items) {
            if (group_caps->find(item.group) == group_caps->end()) {
                throw UnknownGroup("item group not covered by group caps: " + item.id);
            }
        }
    }

    std::vector<std::size_t> picked;
    std::vector<SolverItem> searchable;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const KnapsackItem& item = items[i];
        if (item.value <= 0) {
            continue; // never part of an optimal plan
        }
        if (item.weight == 0) {
            picked.push_back(i); // free value, always selected
            continue;
        }
        if (item.weight > budget) {
            continue;
        }
        if (group_caps && item.weight > group_caps->at(item.group)) {
            continue;
        }
        searchable.push_back({i, item.value, item.weight, item.group});
    }

    if (!searchable.empty()) {
        BranchAndBound solver(std::move(searchable), budget, group_caps);
        solver.run();
        for (std::size_t i : solver.best_originals()) {
            picked.push_back(i);
        }
    }
    return assemble_plan(items, picked);
}

} // namespace

AllocationPlan solve_knapsack(const std::vector<KnapsackItem>& items, Money budget) {
    return solve_with_caps(items, budget, nullptr);
}

AllocationPlan solve_capped_knapsack(const std::vector<KnapsackItem>& items, Money budget,
                                     const std::map<IncomeGroup, Money>& group_caps) {
    return solve_with_caps(items, budget, &group_caps);
}

AllocationPlan solve_equity_knapsack(const std::vector<KnapsackItem>& items, Money budget,
                                     const EquitySpec& eq) {
    eq.validate();
    for (const auto& item : items) {
        if (!eq.contains(item.group)) {
            throw UnknownGroup("item group missing from equity spec: " + item.id);
        }
    }
    const auto budgets = eq.split(budget);

    // The group constraints are separable: solve each group independently.
    AllocationPlan plan;
    for (const auto& [group, group_budget] : budgets) {
        std::vector<KnapsackItem> group_items;
        for (const auto& item : items) {
            if (item.group == group) {
                group_items.push_back(item);
            }
        }
        AllocationPlan part = solve_knapsack(group_items, group_budget);
        plan.selected.insert(plan.selected.end(), part.selected.begin(), part.selected.end());
        plan.incentives.insert(part.incentives.begin(), part.incentives.end());
        plan.total_spend += part.total_spend;
        plan.total_value += part.total_value;
        plan.per_group_spend[group] = part.total_spend;
    }
    std::sort(plan.selected.begin(), plan.selected.end());
    return plan;
}

namespace {

std::vector<KnapsackItem> with_year_values(const std::vector<KnapsackItem>& pool,
                                           const YearValueFn& values, int year) {
    std::vector<KnapsackItem> out = pool;
    if (values) {
        for (auto& item : out) {
            item.value = values(item.id, year);
        }
    }
    return out;
}

void drop_selected(std::vector<KnapsackItem>& pool, const AllocationPlan& plan) {
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [&](const KnapsackItem& item) {
                                  return plan.incentives.count(item.id) > 0;
                              }),
               pool.end());
}

} // namespace

std::vector<AllocationPlan> solve_multiyear(const std::vector<KnapsackItem>& items, Money budget,
                                            int years, const YearValueFn& values,
                                            const MultiYearOptions& opts) {
    if (years < 1) {
        throw std::invalid_argument("years must be at least 1");
    }
    std::vector<AllocationPlan> plans;
    std::vector<KnapsackItem> pool = items;
    Money carry = 0;
    for (int y = 1; y <= years; ++y) {
        const Money year_cap = budget / years + (opts.rollover ? carry : 0);
        AllocationPlan plan = solve_knapsack(with_year_values(pool, values, y), year_cap);
        carry = year_cap - plan.total_spend;
        drop_selected(pool, plan);
        if (opts.refresh) {
            opts.refresh(y, plan, pool);
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::vector<AllocationPlan> solve_multiyear_equity(const std::vector<KnapsackItem>& items,
                                                   Money budget, int years, const EquitySpec& eq,
                                                   EquityOverTime mode, const YearValueFn& values,
                                                   const MultiYearOptions& opts) {
    if (years < 1) {
        throw std::invalid_argument("years must be at least 1");
    }
    eq.validate();
    for (const auto& item : items) {
        if (!eq.contains(item.group)) {
            throw UnknownGroup("item group missing from equity spec: " + item.id);
        }
    }

    std::vector<AllocationPlan> plans;
    std::vector<KnapsackItem> pool = items;
    Money carry = 0;
    std::map<IncomeGroup, Money> horizon_caps = eq.split(budget); // Relaxed budgets per group
    for (int y = 1; y <= years; ++y) {
        const Money year_cap = budget / years + (opts.rollover ? carry : 0);
        const auto year_items = with_year_values(pool, values, y);
        AllocationPlan plan;
        if (mode == EquityOverTime::Strict) {
            plan = solve_equity_knapsack(year_items, year_cap, eq);
        } else {
            plan = solve_capped_knapsack(year_items, year_cap, horizon_caps);
            for (const auto& [group, spend] : plan.per_group_spend) {
                horizon_caps[group] -= spend;
            }
        }
        carry = year_cap - plan.total_spend;
        drop_selected(pool, plan);
        if (opts.refresh) {
            opts.refresh(y, plan, pool);
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::string plan_to_json(const AllocationPlan& plan) {
    nlohmann::json j;
    j["selected"] = plan.selected;
    j["incentives_cents"] = plan.incentives;
    j["total_spend_cents"] = plan.total_spend;
    j["total_value_cents"] = plan.total_value;
    nlohmann::json groups;
    for (const auto& [group, spend] : plan.per_group_spend) {
        groups[to_string(group)] = spend;
    }
    j["per_group_spend_cents"] = groups;
    return j.dump(2);
}

} // namespace decarb
