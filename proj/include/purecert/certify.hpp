#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "purecert/distribution.hpp"
#include "purecert/sampler.hpp"
#include "purecert/schedule.hpp"
#include "purecert/stats.hpp"
#include "purecert/vec.hpp"

namespace purecert {

enum class ClassifierKind { Bayes, NearestPrototype };

int classify(const LabeledDistribution& dist, ClassifierKind kind, const Vec& x);

struct SmoothingParams {
    double sigma = 0.25;
    std::size_t n0 = 100;   // preliminary draws
    std::size_t n = 1000;   // certification draws
    double alpha = 0.001;   // failure probability
    std::size_t k_votes = 40;
    std::size_t b = 10;  // fast-sampling steps

    void validate() const;
};

constexpr int kAbstain = -1;

struct CertificationResult {
    Vec input;
    int predicted_label = kAbstain;  // kAbstain when abstaining
    double pa_lower = 0.0;
    double radius = 0.0;
    std::vector<std::pair<int, std::size_t>> counts;  // per-label vote tallies (cert phase)
    std::uint64_t seed = 0;
    SmoothingParams params;
};

// One majority-vote prediction: scale x_rs by sqrt(abar_n), run the reverse
// K times, classify each endpoint, plurality label (ties to the smaller id).
int denoised_predict_one(const LabeledDistribution& dist, ClassifierKind classifier,
                          const Vec& x_rs, const SmoothingParams& params,
                          const NoiseSchedule& sched, const ReverseConfig& rcfg, Rng rng);

// Two-phase randomized-smoothing certification. Each noisy draw x0 + sigma*eps
// is routed through denoised_predict_one; pa_lower is the one-sided
// Clopper-Pearson bound; radius = sigma * Phi^-1(pa_lower) when pa_lower > 1/2.
CertificationResult certify(const LabeledDistribution& dist, ClassifierKind classifier,
                            const Vec& x0, const SmoothingParams& params,
                            const NoiseSchedule& sched, const ReverseConfig& rcfg,
                            std::uint64_t seed);

// Two-sided Cohen radius (sigma/2)(Phi^-1(pa) - Phi^-1(pb)), exposed as an
// alternative estimator taking both bounds.
double two_class_radius(double sigma, double pa_lower, double pb_upper);

struct CurvePoint {
    double epsilon = 0.0;
    double certified_accuracy = 0.0;
};

struct BatchResult {
    std::vector<CertificationResult> results;
    std::vector<CurvePoint> curve;
};

// Per-point certification plus the certified-accuracy curve over `epsilons`.
// correct_labels[i] is the ground-truth label of points[i].
BatchResult certify_batch(const LabeledDistribution& dist, ClassifierKind classifier,
                          const std::vector<Vec>& points, const std::vector<int>& correct_labels,
                          const SmoothingParams& params, const NoiseSchedule& sched,
                          const ReverseConfig& rcfg, std::uint64_t seed,
                          const std::vector<double>& epsilons);

}  // namespace purecert
