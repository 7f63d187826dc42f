#include "purecert/sampler.hpp"

#include <cmath>

#include "purecert/errors.hpp"

namespace purecert {

namespace {

void check_state(const Vec& x, double bound) {
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > bound) {
            throw NonFiniteState("reverse state left the bounding box; steps too coarse?");
        }
    }
}

// One ancestral update at the given coefficients. noise_scale = 0 on the final
// step.
Vec ddpm_step(const Vec& x, double beta, double alpha_bar, double noise_var,
              const EpsilonPredictor& eps, Rng& rng) {
    const Vec e = eps(x, alpha_bar);
    const double coef = beta / std::sqrt(1.0 - alpha_bar);
    const double inv = 1.0 / std::sqrt(1.0 - beta);
    Vec next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) next[i] = inv * (x[i] - coef * e[i]);
    if (noise_var > 0.0) {
        const double s = std::sqrt(noise_var);
        for (std::size_t i = 0; i < x.size(); ++i) next[i] += s * rng.normal();
    }
    return next;
}

}  // namespace

EpsilonPredictor exact_epsilon_predictor(const LabeledDistribution& dist) {
    return [&dist](const Vec& x, double alpha_bar) {
        Vec score = dist.diffused_score(x, alpha_bar);
        const double c = -std::sqrt(1.0 - alpha_bar);
        for (auto& v : score) v *= c;
        return score;
    };
}

Vec forward_diffuse(const Vec& x0, double alpha_bar, Rng& rng) {
    if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) throw InvalidRange("alpha_bar outside (0,1]");
    const double a = std::sqrt(alpha_bar);
    const double s = std::sqrt(1.0 - alpha_bar);
    Vec x(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) x[i] = a * x0[i] + s * rng.normal();
    return x;
}

ScoreFn exact_score_fn(const LabeledDistribution& dist, const NoiseSchedule& sched) {
    return [&dist, &sched](const Vec& x, double t) {
        return dist.diffused_score(x, sched.alpha_bar_at(t));
    };
}

Vec reverse_sde_exact(const ScoreFn& score, const NoiseSchedule& sched, const Vec& x_start,
                      double t_start, const ReverseConfig& cfg, Rng& rng) {
    if (!(t_start > 0.0 && t_start <= 1.0)) throw InvalidRange("t_start outside (0,1]");
    if (cfg.integrator_steps < 10) throw InvalidRange("exact-sde needs >= 10 integrator steps");
    const double dt = t_start / static_cast<double>(cfg.integrator_steps);
    Vec x = x_start;
    double t = t_start;
    for (std::size_t k = 0; k < cfg.integrator_steps; ++k) {
        const double gamma = sched.gamma_at(t);
        const Vec s = score(x, t);
        const double diff = std::sqrt(gamma * dt);
        // backward step of dx = [-g/2 x - g*score] dt + sqrt(g) dw
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += dt * (0.5 * gamma * x[i] + gamma * s[i]) + diff * rng.normal();
        }
        check_state(x, cfg.state_bound);
        t -= dt;
    }
    return x;
}

Vec reverse_ddpm(const Vec& x_start, const SubSchedule& sub, const EpsilonPredictor& eps, Rng& rng,
                 StepVariance variance) {
    Vec x = x_start;
    const std::size_t m = sub.indices.size();
    for (std::size_t j = 0; j < m; ++j) {
        const bool last = j + 1 == m;
        double var = variance == StepVariance::BetaTilde ? sub.sub_beta_tildes[j] : sub.sub_betas[j];
        if (last) var = 0.0;
        x = ddpm_step(x, sub.sub_betas[j], sub.sub_alpha_bars[j], var, eps, rng);
        check_state(x, 50.0);
    }
    return x;
}

Vec one_shot_denoise(const Vec& x_start, std::size_t n, const NoiseSchedule& sched,
                     const EpsilonPredictor& eps) {
    const SubSchedule sub = build_subschedule(sched, n, 1);
    Rng unused(0);  // no noise is drawn on the single (final) step
    return reverse_ddpm(x_start, sub, eps, unused);
}

}  // namespace purecert
