#pragma once

#include <vector>

#include "purecert/distribution.hpp"
#include "purecert/vec.hpp"

namespace purecert {

// Closed-form conditional posterior of the reverse-process endpoint given the
// scaled start sqrt(alpha_t) x_a: density proportional to
// p(x) * exp(-||x - x_a||^2 / (2 sigma_t^2)).
//
// Prototype case: a finite weight table (softmax of log mass - sq.dist/(2s^2)).
// Mixture case: a Gaussian mixture with product-updated weights, means and
// covariances.
class ConditionalPosterior {
  public:
    ConditionalPosterior(const LabeledDistribution& base, Vec anchor, double sigma_t);

    const LabeledDistribution& base() const { return *base_; }
    const Vec& anchor() const { return anchor_; }
    double sigma_t() const { return sigma_t_; }

    // Posterior weight per base component (both kinds).
    const std::vector<double>& weights() const { return weights_; }
    // Posterior component parameters (mixture kind; equals prototype positions
    // for the prototype kind).
    const std::vector<Component>& posterior_components() const { return post_components_; }

    double log_density(const Vec& x) const;  // mixture kind only
    Vec score(const Vec& x) const;           // gradient of log_density

    Vec sample(Rng& rng) const;  // draw from the closed form

  private:
    const LabeledDistribution* base_;
    Vec anchor_;
    double sigma_t_;
    std::vector<double> weights_;
    std::vector<Component> post_components_;
};

ConditionalPosterior build_posterior(const LabeledDistribution& dist, const Vec& x_a,
                                     double sigma_t);

struct ModeResult {
    Vec argmax_point;
    int argmax_label = 0;
    int runner_up_label = 0;
    double log_density_gap = 0.0;
    bool ascent_converged = true;
};

// P(x_a; t): the highest-density point of the posterior. Exact table argmax in
// the prototype case; multi-start gradient ascent from every posterior
// component mean in the mixture case.
ModeResult highest_density_point(const ConditionalPosterior& post);

struct DivergenceReport {
    double tv = 0.0;
    std::size_t sample_count = 0;
    // Prototype case: per-component empirical frequency, exact weight, and
    // Clopper-Pearson 95% interval on the frequency.
    std::vector<double> empirical;
    std::vector<double> exact;
    std::vector<double> ci_lower;
    std::vector<double> ci_upper;
};

// Prototype case: nearest-prototype assignment and TV against exact weights.
// Mixture case: binned TV over a grid covering 6 sigma of every posterior
// component (grid_per_axis bins per axis, 2-D only).
DivergenceReport endpoint_divergence(const ConditionalPosterior& post,
                                     const std::vector<Vec>& samples,
                                     std::size_t grid_per_axis = 40);

}  // namespace purecert
