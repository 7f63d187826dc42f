#pragma once

#include <cstddef>
#include <vector>

namespace purecert {

// Discrete beta / alpha-bar noise schedule. Also serves the continuous view:
// log alpha_bar(t) is interpolated piecewise-linearly over t = i/N with
// alpha_bar(0) = 1, which makes gamma(t) = -d/dt log alpha(t) piecewise
// constant. Immutable after construction.
class NoiseSchedule {
  public:
    explicit NoiseSchedule(std::vector<double> betas);

    std::size_t length() const { return betas_.size(); }
    const std::vector<double>& betas() const { return betas_; }
    const std::vector<double>& alpha_bars() const { return alpha_bars_; }

    // 1-based timestep accessors matching the chain indexing.
    double beta(std::size_t i) const { return betas_.at(i - 1); }
    double alpha_bar(std::size_t i) const { return alpha_bars_.at(i - 1); }

    // sigma_i = sqrt((1 - abar_i)/abar_i), the reverse-start noise scale.
    double sigma(std::size_t i) const;

    // Continuous view on t in [0, 1]: log-linear interpolation of alpha_bar.
    double alpha_bar_at(double t) const;
    // gamma on the interval containing t (piecewise constant).
    double gamma_at(double t) const;
    // Timestep i as continuous time i/N.
    double time_of(std::size_t i) const;

  private:
    std::vector<double> betas_;
    std::vector<double> alpha_bars_;
    std::vector<double> log_alpha_bars_;
};

NoiseSchedule build_linear_schedule(std::size_t n, double beta_min, double beta_max);

// sigma <-> timestep mapping: n_star = argmin_s |abar_s - 1/(1+sigma^2)|.
struct SigmaTimestepMap {
    double sigma = 0.0;
    std::size_t n_star = 0;
    double achieved_alpha_bar = 0.0;
    double target_alpha_bar = 0.0;
    double gap = 0.0;
    double sigma_at_n_star = 0.0;
    bool clamped = false;  // target below the schedule's reach; clamped to N
};

SigmaTimestepMap map_sigma_to_timestep(const NoiseSchedule& sched, double sigma);

// Fast-sampling subsequence: indices descending from `start` to 1, with
// per-entry recomputed beta and beta-tilde. Entry j covers the reverse step
// from indices[j] down to indices[j+1] (or to 0 for the last entry, whose
// predecessor alpha_bar is 1 and whose beta_tilde is therefore 0).
struct SubSchedule {
    std::vector<std::size_t> indices;
    std::vector<double> sub_alpha_bars;
    std::vector<double> sub_betas;
    std::vector<double> sub_beta_tildes;
    bool collapsed = false;  // duplicate floor indices were merged
};

SubSchedule build_subschedule(const NoiseSchedule& sched, std::size_t start, std::size_t b);

}  // namespace purecert
