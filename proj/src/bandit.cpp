#include "decarb/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "decarb/csvio.hpp"
#include "decarb/rng.hpp"

namespace decarb {

namespace {

// Linear-interpolation sample quantile over a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        return 0.0;
    }
    if (sorted.size() == 1) {
        return sorted.front();
    }
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<Arm> build_arms(const std::vector<AcceptanceThreshold>& thresholds,
                            const ArmConfig& cfg) {
    if (thresholds.empty()) {
        throw EmptyThresholds("cannot build arms from an empty threshold set");
    }
    if (cfg.tier_quantiles.size() != kTiersPerPackage - 1) {
        throw std::invalid_argument("arm construction needs one quantile per non-nominal tier");
    }
    if (cfg.nominal_incentive <= 0) {
        throw std::invalid_argument("nominal incentive must be positive");
    }

    std::vector<Arm> arms;
    arms.reserve(kPackages.size() * kTiersPerPackage);
    for (Package pkg : kPackages) {
        std::vector<double> positive;
        for (const auto& t : thresholds) {
            if (t.package == pkg && t.w_cents > 0) {
                positive.push_back(static_cast<double>(t.w_cents));
            }
        }
        std::sort(positive.begin(), positive.end());

        std::array<Money, kTiersPerPackage> tiers{};
        tiers[0] = cfg.nominal_incentive;
        for (std::size_t q = 0; q < cfg.tier_quantiles.size(); ++q) {
            tiers[q + 1] = positive.empty()
                               ? cfg.nominal_incentive
                               : static_cast<Money>(
                                     std::llround(quantile_sorted(positive, cfg.tier_quantiles[q])));
        }
        // Strictly increasing: collapse duplicates with one-cent spacing.
        for (std::size_t t = 1; t < tiers.size(); ++t) {
            tiers[t] = std::max(tiers[t], tiers[t - 1] + 1);
        }

        for (int t = 0; t < kTiersPerPackage; ++t) {
            Arm arm;
            arm.package = pkg;
            arm.tier = t + 1;
            arm.incentive = tiers[static_cast<std::size_t>(t)];
            arm.index = package_index(pkg) * kTiersPerPackage + t;
            arms.push_back(arm);
        }
    }
    return arms;
}

std::array<std::vector<double>, 2>
context_mean_reduction(const std::vector<int>& context_of,
                       const std::vector<std::array<double, 2>>& annual_tons, int contexts) {
    if (context_of.size() != annual_tons.size()) {
        throw std::invalid_argument("context and reduction tables must align");
    }
    std::array<std::vector<double>, 2> mean;
    std::vector<std::int64_t> count(static_cast<std::size_t>(contexts), 0);
    for (auto& per_pkg : mean) {
        per_pkg.assign(static_cast<std::size_t>(contexts), 0.0);
    }
    for (std::size_t i = 0; i < context_of.size(); ++i) {
        const auto c = static_cast<std::size_t>(context_of[i]);
        count[c] += 1;
        mean[0][c] += annual_tons[i][0];
        mean[1][c] += annual_tons[i][1];
    }
    for (std::size_t c = 0; c < count.size(); ++c) {
        if (count[c] > 0) {
            mean[0][c] /= static_cast<double>(count[c]);
            mean[1][c] /= static_cast<double>(count[c]);
        }
    }
    return mean;
}

namespace {

double derive_reward_cap(const std::array<std::vector<double>, 2>& context_reduction,
                         const std::vector<Arm>& arms) {
    std::vector<double> ratios;
    for (const Arm& arm : arms) {
        const auto& per_context = context_reduction[static_cast<std::size_t>(
            package_index(arm.package))];
        for (double tons : per_context) {
            ratios.push_back(std::max(0.0, tons / cents_to_dollars(arm.incentive)));
        }
    }
    std::sort(ratios.begin(), ratios.end());
    const double p99 = quantile_sorted(ratios, 0.99);
    return p99 > 0.0 ? 10.0 * p99 : 1.0;
}

} // namespace

std::vector<SurveyResponse>
simulate_survey(const std::vector<int>& context_of,
                const std::vector<std::array<Money, 2>>& threshold_cents,
                const std::array<std::vector<double>, 2>& context_reduction,
                const std::vector<Arm>& arms, int n, std::uint64_t seed,
                const SurveyOptions& opts) {
    if (context_of.size() != threshold_cents.size()) {
        throw std::invalid_argument("context and threshold tables must align");
    }
    if (n < 0 || static_cast<std::size_t>(n) > context_of.size()) {
        throw SurveyLargerThanPopulation("survey size " + std::to_string(n) +
                                         " exceeds population " +
                                         std::to_string(context_of.size()));
    }
    if (arms.empty()) {
        throw std::invalid_argument("no arms to survey");
    }
    if (!opts.arm_weights.empty() && opts.arm_weights.size() != arms.size()) {
        throw std::invalid_argument("arm weight vector must match the arm count");
    }

    const double cap =
        opts.reward_cap > 0.0 ? opts.reward_cap : derive_reward_cap(context_reduction, arms);

    Rng rng(seed);
    const auto sampled = rng.sample_without_replacement(context_of.size(), static_cast<std::size_t>(n));

    double weight_total = 0.0;
    for (double w : opts.arm_weights) {
        weight_total += w;
    }

    std::vector<SurveyResponse> data;
    data.reserve(sampled.size());
    for (std::size_t i : sampled) {
        std::size_t arm_idx = 0;
        if (opts.arm_weights.empty()) {
            arm_idx = rng.uniform_index(arms.size());
        } else {
            double target = rng.uniform() * weight_total;
            while (arm_idx + 1 < arms.size() && target >= opts.arm_weights[arm_idx]) {
                target -= opts.arm_weights[arm_idx];
                ++arm_idx;
            }
        }
        const Arm& arm = arms[arm_idx];
        const int pkg = package_index(arm.package);
        const bool accepts = arm.incentive >= threshold_cents[i][static_cast<std::size_t>(pkg)];

        SurveyResponse response;
        response.context = context_of[i];
        response.arm = arm.index;
        if (accepts) {
            const double tons =
                context_reduction[static_cast<std::size_t>(pkg)][static_cast<std::size_t>(
                    context_of[i])];
            response.reward = std::clamp(tons / cents_to_dollars(arm.incentive), 0.0, cap);
        }
        data.push_back(response);
    }
    return data;
}

LcbAccumulator::LcbAccumulator(int arms, int contexts) : arms_(arms), contexts_(contexts) {
    if (arms <= 0 || contexts <= 0) {
        throw std::invalid_argument("arm and context counts must be positive");
    }
    const std::size_t cells = static_cast<std::size_t>(arms) * static_cast<std::size_t>(contexts);
    counts_.assign(cells, 0);
    sums_.assign(cells, 0.0);
}

void LcbAccumulator::add(int context, int arm, double reward) {
    if (arm < 0 || arm >= arms_ || context < 0 || context >= contexts_) {
        throw std::out_of_range("survey response outside the (arm, context) grid");
    }
    const std::size_t cell =
        static_cast<std::size_t>(arm) * static_cast<std::size_t>(contexts_) +
        static_cast<std::size_t>(context);
    counts_[cell] += 1;
    sums_[cell] += reward;
    ++n_;
}

LcbEstimator LcbAccumulator::finalize(double alpha) const {
    if (n_ == 0) {
        throw std::invalid_argument("cannot fit an estimator without responses");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    LcbEstimator est;
    est.arms = arms_;
    est.contexts = contexts_;
    est.n = n_;
    est.alpha = alpha;
    est.counts = counts_;
    est.mean.assign(counts_.size(), 0.0);
    est.lcb.assign(counts_.size(), 0.0);
    const double log_n = std::log(static_cast<double>(n_));
    for (std::size_t cell = 0; cell < counts_.size(); ++cell) {
        if (counts_[cell] > 0) {
            est.mean[cell] = sums_[cell] / static_cast<double>(counts_[cell]);
            const double penalty = alpha * std::sqrt(log_n / static_cast<double>(counts_[cell]));
            est.lcb[cell] = std::max(est.mean[cell] - penalty, 0.0);
        }
    }
    return est;
}

LcbEstimator fit_lcb(const std::vector<SurveyResponse>& data, int arms, int contexts,
                     double alpha) {
    LcbAccumulator acc(arms, contexts);
    for (const auto& response : data) {
        acc.add(response.context, response.arm, response.reward);
    }
    return acc.finalize(alpha);
}

std::vector<int> best_arms(const LcbEstimator& est, const std::vector<Arm>& arms) {
    if (static_cast<int>(arms.size()) != est.arms) {
        throw std::invalid_argument("arm list does not match the estimator");
    }
    std::vector<int> chosen(static_cast<std::size_t>(est.contexts), 0);
    for (int c = 0; c < est.contexts; ++c) {
        int best = 0;
        for (int k = 1; k < est.arms; ++k) {
            const double lcb = est.lcb[est.cell(k, c)];
            const double best_lcb = est.lcb[est.cell(best, c)];
            if (lcb > best_lcb ||
                (lcb == best_lcb &&
                 arms[static_cast<std::size_t>(k)].incentive <
                     arms[static_cast<std::size_t>(best)].incentive)) {
                best = k;
            }
        }
        chosen[static_cast<std::size_t>(c)] = best;
    }
    return chosen;
}

std::int64_t required_samples(double c_star, double epsilon, int max_iterations) {
    if (!(c_star >= 1.0)) {
        throw std::invalid_argument("coverage constant must be at least 1");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    const auto requirement = [&](double n) {
        const double log_n = std::log(std::max(n, 2.0));
        return std::max(4.0 * c_star * log_n / (epsilon * epsilon), 8.0 * c_star * log_n);
    };

    double n = std::max({4.0 * c_star / (epsilon * epsilon), 8.0 * c_star, 3.0});
    bool converged = false;
    for (int i = 0; i < max_iterations; ++i) {
        const double next = requirement(n);
        if (std::abs(next - n) < 0.5) {
            n = next;
            converged = true;
            break;
        }
        n = next;
    }
    if (!converged) {
        throw NoConvergence("sample-size fixed point did not converge");
    }

    // Land on the smallest integer satisfying both inequalities.
    std::int64_t candidate = std::max<std::int64_t>(2, static_cast<std::int64_t>(n) - 4);
    while (static_cast<double>(candidate) < requirement(static_cast<double>(candidate))) {
        ++candidate;
    }
    return candidate;
}

void write_survey_csv(const std::filesystem::path& path,
                      const std::vector<SurveyResponse>& data) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out << "context,arm,reward\n";
    char buf[64];
    for (const auto& response : data) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.12g\n", response.context, response.arm,
                      response.reward);
        out << buf;
    }
}

std::vector<SurveyResponse> read_survey_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const auto context_col = table.column("context");
    const auto arm_col = table.column("arm");
    const auto reward_col = table.column("reward");
    if (!context_col || !arm_col || !reward_col) {
        throw std::runtime_error("survey CSV needs columns context, arm, reward");
    }
    std::vector<SurveyResponse> data;
    data.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        SurveyResponse response;
        response.context = std::stoi(row[*context_col]);
        response.arm = std::stoi(row[*arm_col]);
        response.reward = std::stod(row[*reward_col]);
        data.push_back(response);
    }
    return data;
}

} // namespace decarb
