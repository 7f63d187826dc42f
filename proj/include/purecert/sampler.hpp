#pragma once

#include <functional>

#include "purecert/distribution.hpp"
#include "purecert/rng.hpp"
#include "purecert/schedule.hpp"
#include "purecert/vec.hpp"

namespace purecert {

enum class ReverseMode { ExactSde, DdpmAncestral, DdpmFast, OneShot };

enum class StepVariance { BetaTilde, Beta };

struct ReverseConfig {
    ReverseMode mode = ReverseMode::DdpmFast;
    std::size_t integrator_steps = 500;  // exact-sde only
    std::size_t sub_steps = 10;          // ddpm-fast only
    StepVariance variance = StepVariance::BetaTilde;
    double state_bound = 50.0;  // divergence guard (data units)
};

// Noise predictor eps_hat(x, alpha_bar). The exact variant is derived from the
// analytic score via eps = -sqrt(1 - abar) * score.
using EpsilonPredictor = std::function<Vec(const Vec&, double alpha_bar)>;

EpsilonPredictor exact_epsilon_predictor(const LabeledDistribution& dist);

// x0 -> sqrt(abar) x0 + sqrt(1 - abar) eps
Vec forward_diffuse(const Vec& x0, double alpha_bar, Rng& rng);

// Score evaluated at continuous time t (through the schedule's alpha_bar(t)),
// optionally perturbed; used by the exact reverse-SDE integrator.
using ScoreFn = std::function<Vec(const Vec&, double t)>;

ScoreFn exact_score_fn(const LabeledDistribution& dist, const NoiseSchedule& sched);

// Euler-Maruyama integration of the reverse SDE from (x_start, t_start) to 0.
// x_start is the scaled start point sqrt(alpha_bar(t_start)) * x_a.
Vec reverse_sde_exact(const ScoreFn& score, const NoiseSchedule& sched, const Vec& x_start,
                      double t_start, const ReverseConfig& cfg, Rng& rng);

// Ancestral DDPM reverse over a (sub-)schedule. x_start is scaled by
// sqrt(alpha_bar at the start index). The last step adds no noise.
Vec reverse_ddpm(const Vec& x_start, const SubSchedule& sub, const EpsilonPredictor& eps, Rng& rng,
                 StepVariance variance = StepVariance::BetaTilde);

// Deterministic b = 1 denoise; bit-identical to reverse_ddpm on the one-entry
// sub-schedule.
Vec one_shot_denoise(const Vec& x_start, std::size_t n, const NoiseSchedule& sched,
                     const EpsilonPredictor& eps);

}  // namespace purecert
