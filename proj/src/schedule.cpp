#include "purecert/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "purecert/errors.hpp"

namespace purecert {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    if (betas_.size() < 2) throw InvalidRange("schedule needs at least 2 steps");
    double prev = 0.0;
    for (double b : betas_) {
        if (!(b > prev && b < 1.0)) throw InvalidRange("betas must be strictly increasing in (0,1)");
        prev = b;
    }
    alpha_bars_.resize(betas_.size());
    log_alpha_bars_.resize(betas_.size());
    double log_ab = 0.0;
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        log_ab += std::log1p(-betas_[i]);
        log_alpha_bars_[i] = log_ab;
        alpha_bars_[i] = std::exp(log_ab);
    }
}

double NoiseSchedule::sigma(std::size_t i) const {
    const double ab = alpha_bar(i);
    return std::sqrt((1.0 - ab) / ab);
}

double NoiseSchedule::time_of(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(length());
}

double NoiseSchedule::alpha_bar_at(double t) const {
    if (t <= 0.0) return 1.0;
    const double n = static_cast<double>(length());
    const double s = std::min(t, 1.0) * n;  // continuous index in [0, N]
    const std::size_t i = static_cast<std::size_t>(std::ceil(s - 1e-12));
    const std::size_t hi = std::min<std::size_t>(std::max<std::size_t>(i, 1), length());
    const double log_lo = (hi == 1) ? 0.0 : log_alpha_bars_[hi - 2];
    const double log_hi = log_alpha_bars_[hi - 1];
    const double frac = s - static_cast<double>(hi - 1);
    return std::exp(log_lo + frac * (log_hi - log_lo));
}

double NoiseSchedule::gamma_at(double t) const {
    const double n = static_cast<double>(length());
    const double s = std::clamp(t, 0.0, 1.0) * n;
    std::size_t i = static_cast<std::size_t>(std::ceil(s - 1e-12));
    i = std::min<std::size_t>(std::max<std::size_t>(i, 1), length());
    return -n * std::log1p(-betas_[i - 1]);
}

NoiseSchedule build_linear_schedule(std::size_t n, double beta_min, double beta_max) {
    if (n < 2) throw InvalidRange("schedule length must be >= 2");
    if (!(beta_min > 0.0 && beta_min < beta_max && beta_max < 1.0)) {
        throw InvalidRange("need 0 < beta_min < beta_max < 1");
    }
    std::vector<double> betas(n);
    for (std::size_t i = 0; i < n; ++i) {
        betas[i] = beta_min + (beta_max - beta_min) * static_cast<double>(i) /
                                  static_cast<double>(n - 1);
    }
    return NoiseSchedule(std::move(betas));
}

SigmaTimestepMap map_sigma_to_timestep(const NoiseSchedule& sched, double sigma) {
    if (!(sigma > 0.0)) throw InvalidRange("sigma must be positive");
    SigmaTimestepMap m;
    m.sigma = sigma;
    m.target_alpha_bar = 1.0 / (1.0 + sigma * sigma);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s <= sched.length(); ++s) {
        const double d = std::abs(sched.alpha_bar(s) - m.target_alpha_bar);
        if (d < best) {  // strict: ties go to the smaller s
            best = d;
            m.n_star = s;
        }
    }
    m.achieved_alpha_bar = sched.alpha_bar(m.n_star);
    m.gap = best;
    m.sigma_at_n_star = sched.sigma(m.n_star);
    m.clamped = m.n_star == sched.length() && m.target_alpha_bar < sched.alpha_bar(sched.length()) / 2.0;
    return m;
}

SubSchedule build_subschedule(const NoiseSchedule& sched, std::size_t start, std::size_t b) {
    if (!(b >= 1 && b <= start && start <= sched.length())) {
        throw InvalidRange("need 1 <= b <= start <= N");
    }
    SubSchedule sub;
    sub.indices.push_back(start);
    for (std::size_t j = 1; j < b; ++j) {
        std::size_t idx = static_cast<std::size_t>(
            std::floor(static_cast<double>(start) -
                       static_cast<double>(j) * static_cast<double>(start) / static_cast<double>(b)));
        if (j == b - 1) idx = 1;  // last entry forced to 1
        idx = std::max<std::size_t>(idx, 1);
        if (idx >= sub.indices.back()) {
            sub.collapsed = true;  // floor collision; drop the duplicate
            continue;
        }
        sub.indices.push_back(idx);
    }
    const std::size_t m = sub.indices.size();
    sub.sub_alpha_bars.resize(m);
    sub.sub_betas.resize(m);
    sub.sub_beta_tildes.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double ab = sched.alpha_bar(sub.indices[j]);
        // predecessor in chain time is the next (lower) index; alpha_bar_0 = 1
        const double ab_prev = (j + 1 < m) ? sched.alpha_bar(sub.indices[j + 1]) : 1.0;
        sub.sub_alpha_bars[j] = ab;
        sub.sub_betas[j] = 1.0 - ab / ab_prev;
        sub.sub_beta_tildes[j] = (1.0 - ab_prev) / (1.0 - ab) * sub.sub_betas[j];
    }
    return sub;
}

}  // namespace purecert
