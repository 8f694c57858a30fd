#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "decarb/acceptance.hpp"
#include "decarb/money.hpp"
#include "decarb/retrofit.hpp"

namespace decarb {

inline constexpr double kDefaultLcbAlpha = 0.7071067811865476; // 1/sqrt(2)
inline constexpr int kTiersPerPackage = 5;

inline int package_index(Package p) { return p == Package::JustHeatPump ? 0 : 1; }

// One offer: a decarbonization package plus an incentive tier. Tier 1 is the
// nominal tier; incentives are strictly increasing in tier per package.
struct Arm {
    int index = 0; // 0..K-1, package-major
    Package package = Package::JustHeatPump;
    int tier = 1;       // 1..5
    Money incentive = 0; // cents
};

struct SurveyResponse {
    int context = 0; // 0..C-1
    int arm = 0;     // 0..K-1
    double reward = 0.0; // tCO2 per USD, clamped to [0, cap]; 0 on rejection
};

struct EmptyThresholds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SurveyLargerThanPopulation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArmConfig {
    Money nominal_incentive = 10000; // cents; tier-1 "no real incentive needed" offer
    std::vector<double> tier_quantiles = {0.2, 0.4, 0.6, 0.8}; // tiers 2..5
};

// Builds the K = |packages| * 5 arms. Tiers 2..5 per package sit at the
// configured quantiles of that package's positive thresholds; equal quantile
// values are spread apart by one cent to keep tiers strictly increasing.
std::vector<Arm> build_arms(const std::vector<AcceptanceThreshold>& thresholds,
                            const ArmConfig& cfg = {});

struct SurveyOptions {
    std::vector<double> arm_weights; // optional sampling bias; empty = uniform
    double reward_cap = 0.0;         // <= 0 derives the cap from the reward table
};

// Mean annual carbon reduction (tons) per (package, context) over the whole
// population; this is the designer-side estimate behind survey rewards.
std::array<std::vector<double>, 2>
context_mean_reduction(const std::vector<int>& context_of,
                       const std::vector<std::array<double, 2>>& annual_tons, int contexts);

// Samples n households without replacement, offers each one uniformly random
// arm, and records reward R(package, context)/incentive on acceptance.
std::vector<SurveyResponse>
simulate_survey(const std::vector<int>& context_of,
                const std::vector<std::array<Money, 2>>& threshold_cents,
                const std::array<std::vector<double>, 2>& context_reduction,
                const std::vector<Arm>& arms, int n, std::uint64_t seed,
                const SurveyOptions& opts = {});

struct LcbEstimator {
    int arms = 0;
    int contexts = 0;
    std::size_t n = 0;
    double alpha = kDefaultLcbAlpha;
    std::vector<std::int64_t> counts; // arms * contexts, arm-major
    std::vector<double> mean;
    std::vector<double> lcb;

    std::size_t cell(int arm, int context) const {
        return static_cast<std::size_t>(arm) * static_cast<std::size_t>(contexts) +
               static_cast<std::size_t>(context);
    }
};

// Streaming builder so large synthetic datasets never need materializing.
class LcbAccumulator {
  public:
    LcbAccumulator(int arms, int contexts);
    void add(int context, int arm, double reward);
    LcbEstimator finalize(double alpha = kDefaultLcbAlpha) const;

  private:
    int arms_;
    int contexts_;
    std::size_t n_ = 0;
    std::vector<std::int64_t> counts_;
    std::vector<double> sums_;
};

LcbEstimator fit_lcb(const std::vector<SurveyResponse>& data, int arms, int contexts,
                     double alpha = kDefaultLcbAlpha);

// Per-context argmax of the LCB; ties prefer the lower incentive, then the
// lower arm index.
std::vector<int> best_arms(const LcbEstimator& est, const std::vector<Arm>& arms);

// Smallest N with N >= 4 C* ln(N) / eps^2 and N >= 8 C* ln(N) (the Chernoff
// condition), found by fixed-point iteration.
std::int64_t required_samples(double c_star, double epsilon, int max_iterations = 1000);

void write_survey_csv(const std::filesystem::path& path, const std::vector<SurveyResponse>& data);
std::vector<SurveyResponse> read_survey_csv(const std::filesystem::path& path);

} // namespace decarb
