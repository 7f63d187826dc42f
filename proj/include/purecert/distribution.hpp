#pragma once

#include <string>
#include <vector>

#include "purecert/rng.hpp"
#include "purecert/vec.hpp"

namespace purecert {

enum class DistributionKind { PrototypeSet, GaussianMixture };

// One component of a labeled distribution. For a prototype set `weight` is the
// point mass and `cov_diag` is unused; for a mixture `cov_diag` holds the
// diagonal of a positive-definite covariance (isotropic = all entries equal).
struct Component {
    double weight = 0.0;
    Vec mean;
    Vec cov_diag;
    int label = 0;
};

// Immutable labeled data distribution: finite prototype set (point masses) or
// labeled Gaussian mixture with diagonal covariances. All operations are pure.
class LabeledDistribution {
  public:
    LabeledDistribution(DistributionKind kind, std::vector<Component> components);

    DistributionKind kind() const { return kind_; }
    std::size_t dimension() const { return dimension_; }
    const std::vector<Component>& components() const { return components_; }
    const std::vector<int>& labels() const { return distinct_labels_; }

    // Mixture density sum_k w_k N(x; mu_k, Sigma_k). Prototype sets have no
    // density; callers use component masses instead.
    double density(const Vec& x) const;

    // log density of the diffused marginal at level alpha_bar: the mixture with
    // means sqrt(ab)*mu_k and covariances ab*Sigma_k + (1-ab)*I. At ab = 1 the
    // prototype marginal is singular.
    double log_diffused_density(const Vec& x, double alpha_bar) const;

    // Gradient of log_diffused_density, from closed-form component
    // responsibilities (log-sum-exp weighted).
    Vec diffused_score(const Vec& x, double alpha_bar) const;

    // argmax over labels of the per-label evidence; ties to the smallest id.
    // Mixture evidence is the summed component density; prototype evidence uses
    // a unit-variance Gaussian kernel around each prototype so that equal
    // masses reduce to nearest-prototype behavior.
    int bayes_classify(const Vec& x) const;

    // Label of the Euclidean-nearest prototype; ties to the smallest class id,
    // then smallest component index. Prototype sets only.
    int nearest_prototype_classify(const Vec& x) const;

    // Index of the Euclidean-nearest component (either kind).
    std::size_t nearest_component(const Vec& x) const;

    // Draw x0 ~ p (categorical over components; mixture adds component noise).
    Vec sample(Rng& rng) const;

  private:
    void check_dimension(const Vec& x) const;

    DistributionKind kind_;
    std::vector<Component> components_;
    std::size_t dimension_;
    std::vector<int> distinct_labels_;
};

LabeledDistribution make_prototype_set(std::vector<Component> components);
LabeledDistribution make_gaussian_mixture(std::vector<Component> components);

}  // namespace purecert
