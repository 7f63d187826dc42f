#include "purecert/posterior.hpp"

#include <cmath>

#include "purecert/errors.hpp"
#include "purecert/stats.hpp"

namespace purecert {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double log_gaussian_diag(const Vec& x, const Vec& mean, const Vec& var) {
    double quad = 0.0, logdet = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean[i];
        quad += d * d / var[i];
        logdet += std::log(var[i]);
    }
    return -0.5 * (quad + logdet + static_cast<double>(x.size()) * std::log(kTwoPi));
}

}  // namespace

ConditionalPosterior::ConditionalPosterior(const LabeledDistribution& base, Vec anchor,
                                           double sigma_t)
    : base_(&base), anchor_(std::move(anchor)), sigma_t_(sigma_t) {
    if (sigma_t <= 1e-12) throw DegenerateSigma("sigma_t <= 1e-12: posterior collapses");
    if (anchor_.size() != base.dimension()) throw DimensionMismatch("anchor dimension mismatch");
    const double s2 = sigma_t * sigma_t;
    const auto& comps = base.components();
    std::vector<double> logw(comps.size());
    post_components_.resize(comps.size());

    for (std::size_t k = 0; k < comps.size(); ++k) {
        const auto& c = comps[k];
        auto& pc = post_components_[k];
        pc.label = c.label;
        if (base.kind() == DistributionKind::PrototypeSet) {
            logw[k] = std::log(c.weight) - squared_distance(c.mean, anchor_) / (2.0 * s2);
            pc.mean = c.mean;
        } else {
            // product of N(mu_k, Sigma_k) and N(x_a, s2 I), per axis
            const std::size_t d = base.dimension();
            pc.mean.resize(d);
            pc.cov_diag.resize(d);
            Vec marg_var(d);
            for (std::size_t i = 0; i < d; ++i) {
                const double v = c.cov_diag[i];
                pc.cov_diag[i] = v * s2 / (v + s2);
                pc.mean[i] = pc.cov_diag[i] * (c.mean[i] / v + anchor_[i] / s2);
                marg_var[i] = v + s2;
            }
            logw[k] = std::log(c.weight) + log_gaussian_diag(anchor_, c.mean, marg_var);
        }
    }
    const double lse = log_sum_exp(logw);
    weights_.resize(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        weights_[k] = std::exp(logw[k] - lse);
        post_components_[k].weight = weights_[k];
    }
}

double ConditionalPosterior::log_density(const Vec& x) const {
    if (base_->kind() != DistributionKind::GaussianMixture) {
        throw UnsupportedKind("posterior density is only defined for the mixture kind");
    }
    std::vector<double> logs(post_components_.size());
    for (std::size_t k = 0; k < post_components_.size(); ++k) {
        const auto& pc = post_components_[k];
        logs[k] = std::log(weights_[k]) + log_gaussian_diag(x, pc.mean, pc.cov_diag);
    }
    return log_sum_exp(logs);
}

Vec ConditionalPosterior::score(const Vec& x) const {
    if (base_->kind() != DistributionKind::GaussianMixture) {
        throw UnsupportedKind("posterior score is only defined for the mixture kind");
    }
    const std::size_t n = post_components_.size();
    std::vector<double> logs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& pc = post_components_[k];
        logs[k] = std::log(weights_[k]) + log_gaussian_diag(x, pc.mean, pc.cov_diag);
    }
    const double lse = log_sum_exp(logs);
    Vec g(x.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double resp = std::exp(logs[k] - lse);
        const auto& pc = post_components_[k];
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] += resp * (pc.mean[i] - x[i]) / pc.cov_diag[i];
        }
    }
    return g;
}

Vec ConditionalPosterior::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = weights_.size() - 1;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        acc += weights_[k];
        if (u <= acc) {
            pick = k;
            break;
        }
    }
    Vec x = post_components_[pick].mean;
    if (base_->kind() == DistributionKind::GaussianMixture) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += std::sqrt(post_components_[pick].cov_diag[i]) * rng.normal();
        }
    }
    return x;
}

ConditionalPosterior build_posterior(const LabeledDistribution& dist, const Vec& x_a,
                                     double sigma_t) {
    return ConditionalPosterior(dist, x_a, sigma_t);
}

ModeResult highest_density_point(const ConditionalPosterior& post) {
    ModeResult res;
    const auto& comps = post.posterior_components();
    const auto& w = post.weights();

    if (post.base().kind() == DistributionKind::PrototypeSet) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < w.size(); ++k) {
            if (w[k] > w[best]) best = k;  // ties keep the smaller index
        }
        res.argmax_point = comps[best].mean;
        res.argmax_label = comps[best].label;
        if (w.size() > 1) {
            std::size_t runner = best == 0 ? 1 : 0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                if (k != best && w[k] > w[runner]) runner = k;
            }
            res.runner_up_label = comps[runner].label;
            res.log_density_gap = std::log(w[best]) - std::log(w[runner]);
        } else {
            res.runner_up_label = res.argmax_label;
            res.log_density_gap = 0.0;
        }
        return res;
    }

    // multi-start ascent from every posterior component mean
    double best_logp = -std::numeric_limits<double>::infinity();
    double second_logp = -std::numeric_limits<double>::infinity();
    Vec best_point;
    bool converged_any = false;
    for (const auto& pc : comps) {
        Vec x = pc.mean;
        double step = 0.5 * *std::min_element(pc.cov_diag.begin(), pc.cov_diag.end());
        bool converged = false;
        double logp = post.log_density(x);
        for (int it = 0; it < 5000; ++it) {
            const Vec g = post.score(x);
            if (norm(g) <= 1e-9) {
                converged = true;
                break;
            }
            Vec trial = x;
            axpy(step, g, trial);
            const double trial_logp = post.log_density(trial);
            if (trial_logp > logp) {
                x = trial;
                logp = trial_logp;
                step *= 1.1;
            } else {
                step *= 0.5;
                if (step < 1e-16) break;
            }
        }
        converged_any = converged_any || converged;
        if (logp > best_logp) {
            second_logp = best_logp;
            best_logp = logp;
            best_point = x;
        } else if (logp > second_logp) {
            second_logp = logp;
        }
    }
    res.argmax_point = best_point;
    res.argmax_label = post.base().bayes_classify(best_point);
    res.runner_up_label = res.argmax_label;
    res.log_density_gap = std::isfinite(second_logp) ? best_logp - second_logp : 0.0;
    if (res.log_density_gap < 0.0) res.log_density_gap = 0.0;
    res.ascent_converged = converged_any;
    return res;
}

DivergenceReport endpoint_divergence(const ConditionalPosterior& post,
                                     const std::vector<Vec>& samples,
                                     std::size_t grid_per_axis) {
    if (samples.size() < 100) throw TooFewSamples("need at least 100 samples");
    DivergenceReport rep;
    rep.sample_count = samples.size();
    const auto& base = post.base();

    if (base.kind() == DistributionKind::PrototypeSet) {
        const std::size_t k = base.components().size();
        std::vector<std::size_t> counts(k, 0);
        for (const auto& s : samples) counts[base.nearest_component(s)]++;
        rep.empirical.resize(k);
        rep.exact = post.weights();
        rep.ci_lower.resize(k);
        rep.ci_upper.resize(k);
        double tv = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            rep.empirical[j] = static_cast<double>(counts[j]) / static_cast<double>(samples.size());
            tv += std::abs(rep.empirical[j] - rep.exact[j]);
            rep.ci_lower[j] = clopper_pearson_lower(counts[j], samples.size(), 0.025);
            rep.ci_upper[j] = 1.0 - clopper_pearson_lower(samples.size() - counts[j], samples.size(), 0.025);
        }
        rep.tv = 0.5 * tv;
        return rep;
    }

    // mixture: binned TV over a box covering 6 sigma of every posterior component
    if (base.dimension() != 2) throw UnsupportedKind("binned divergence implemented for 2-D");
    const auto& comps = post.posterior_components();
    Vec lo(2, std::numeric_limits<double>::infinity());
    Vec hi(2, -std::numeric_limits<double>::infinity());
    for (const auto& pc : comps) {
        for (std::size_t i = 0; i < 2; ++i) {
            const double s = std::sqrt(pc.cov_diag[i]);
            lo[i] = std::min(lo[i], pc.mean[i] - 6.0 * s);
            hi[i] = std::max(hi[i], pc.mean[i] + 6.0 * s);
        }
    }
    const std::size_t g = grid_per_axis;
    const double dx = (hi[0] - lo[0]) / static_cast<double>(g);
    const double dy = (hi[1] - lo[1]) / static_cast<double>(g);
    std::vector<double> emp(g * g, 0.0), exact(g * g, 0.0);
    double inside = 0.0;
    for (const auto& s : samples) {
        const auto ix = static_cast<std::int64_t>(std::floor((s[0] - lo[0]) / dx));
        const auto iy = static_cast<std::int64_t>(std::floor((s[1] - lo[1]) / dy));
        if (ix < 0 || iy < 0 || ix >= static_cast<std::int64_t>(g) || iy >= static_cast<std::int64_t>(g)) continue;
        emp[static_cast<std::size_t>(ix) * g + static_cast<std::size_t>(iy)] += 1.0;
        inside += 1.0;
    }
    for (auto& e : emp) e /= static_cast<double>(samples.size());
    // exact bin mass via per-axis normal CDF differences
    auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    for (std::size_t k2 = 0; k2 < comps.size(); ++k2) {
        const auto& pc = comps[k2];
        const double sx = std::sqrt(pc.cov_diag[0]);
        const double sy = std::sqrt(pc.cov_diag[1]);
        for (std::size_t ix = 0; ix < g; ++ix) {
            const double x0 = lo[0] + static_cast<double>(ix) * dx;
            const double px = cdf((x0 + dx - pc.mean[0]) / sx) - cdf((x0 - pc.mean[0]) / sx);
            for (std::size_t iy = 0; iy < g; ++iy) {
                const double y0 = lo[1] + static_cast<double>(iy) * dy;
                const double py = cdf((y0 + dy - pc.mean[1]) / sy) - cdf((y0 - pc.mean[1]) / sy);
                exact[ix * g + iy] += post.weights()[k2] * px * py;
            }
        }
    }
    double tv = 0.0;
    double exact_total = 0.0;
    for (std::size_t i = 0; i < g * g; ++i) {
        tv += std::abs(emp[i] - exact[i]);
        exact_total += exact[i];
    }
    // mass outside the box on each side
    tv += std::abs((1.0 - inside / static_cast<double>(samples.size())) - (1.0 - exact_total));
    rep.tv = 0.5 * tv;
    return rep;
}

}  // namespace purecert
