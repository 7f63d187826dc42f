#pragma once

#include <string>

#include "purecert/distribution.hpp"
#include "purecert/sampler.hpp"
#include "purecert/schedule.hpp"
#include "purecert/vec.hpp"

namespace purecert {

enum class PerturbationKind { ConstantVector, ScaledNoise, Radial };

// Controlled score error delta(x, tau); the perturbed score is
// exact score + delta.
struct ScorePerturbation {
    PerturbationKind kind = PerturbationKind::ConstantVector;
    double magnitude = 0.0;
    Vec direction;  // constant-vector: unit direction (scaled by magnitude)

    Vec delta(const Vec& x, double tau) const;
    void validate(std::size_t dimension) const;
};

struct JsmEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

// Monte-Carlo estimate of the score-matching loss
//   1/2 int_0^t E_{p_tau}[ lambda(tau) ||delta(x, tau)||^2 ] dtau
// with lambda = g^2 = gamma (likelihood weighting). lambda_scale multiplies
// the weighting for the linearity property.
JsmEstimate estimate_jsm(const LabeledDistribution& dist, const ScorePerturbation& pert, double t,
                         const NoiseSchedule& sched, std::size_t mc_samples, Rng rng,
                         double lambda_scale = 1.0);

struct ScoreGapReport {
    JsmEstimate jsm;
    double endpoint_tv = 0.0;
    double tv_stderr = 0.0;  // combined two-sample binomial-style error
    std::size_t runs = 0;
};

// Runs the exact-score and perturbed-score reverse SDE from the same scaled
// start and reports the label TV between the two endpoint distributions,
// alongside the J_SM estimate.
ScoreGapReport compare_endpoint_distributions(const LabeledDistribution& dist,
                                              const ScorePerturbation& pert, const Vec& x_a,
                                              double t, const NoiseSchedule& sched,
                                              std::size_t runs, std::size_t integrator_steps,
                                              Rng rng, std::size_t jsm_samples = 20000);

}  // namespace purecert
