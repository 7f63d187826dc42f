#include "purecert/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "purecert/errors.hpp"

namespace purecert {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWeightTol = 1e-12;
constexpr double kMinEigenvalue = 1e-10;

// log N(x; mean, diag(var))
double log_gaussian(const Vec& x, const Vec& mean, const Vec& var) {
    double quad = 0.0;
    double logdet = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean[i];
        quad += d * d / var[i];
        logdet += std::log(var[i]);
    }
    return -0.5 * (quad + logdet + static_cast<double>(x.size()) * std::log(kTwoPi));
}

}  // namespace

LabeledDistribution::LabeledDistribution(DistributionKind kind, std::vector<Component> components)
    : kind_(kind), components_(std::move(components)) {
    if (components_.empty()) throw InvalidRange("distribution needs at least one component");
    dimension_ = components_.front().mean.size();
    if (dimension_ == 0) throw InvalidRange("zero-dimensional component");

    double total = 0.0;
    std::set<int> labels;
    for (const auto& c : components_) {
        if (c.mean.size() != dimension_) throw DimensionMismatch("component dimension mismatch");
        if (!all_finite(c.mean)) throw InvalidRange("non-finite component position");
        if (!(c.weight > 0.0 && c.weight <= 1.0)) throw InvalidRange("component weight outside (0,1]");
        total += c.weight;
        labels.insert(c.label);
        if (kind_ == DistributionKind::GaussianMixture) {
            if (c.cov_diag.size() != dimension_) throw DimensionMismatch("covariance dimension mismatch");
            for (double v : c.cov_diag) {
                if (!(v >= kMinEigenvalue)) throw InvalidRange("covariance eigenvalue below 1e-10");
            }
        }
    }
    if (std::abs(total - 1.0) > kWeightTol) throw InvalidRange("component weights must sum to 1");
    distinct_labels_.assign(labels.begin(), labels.end());
}

void LabeledDistribution::check_dimension(const Vec& x) const {
    if (x.size() != dimension_) throw DimensionMismatch("query dimension mismatch");
}

double LabeledDistribution::density(const Vec& x) const {
    check_dimension(x);
    if (kind_ != DistributionKind::GaussianMixture) {
        throw UnsupportedKind("prototype sets have no density; use component masses");
    }
    std::vector<double> logs;
    logs.reserve(components_.size());
    for (const auto& c : components_) {
        logs.push_back(std::log(c.weight) + log_gaussian(x, c.mean, c.cov_diag));
    }
    return std::exp(log_sum_exp(logs));
}

double LabeledDistribution::log_diffused_density(const Vec& x, double alpha_bar) const {
    check_dimension(x);
    if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) throw InvalidRange("alpha_bar outside (0,1]");
    if (kind_ == DistributionKind::PrototypeSet && alpha_bar == 1.0) {
        throw SingularMarginal("prototype marginal is singular at alpha_bar = 1");
    }
    const double root = std::sqrt(alpha_bar);
    std::vector<double> logs;
    logs.reserve(components_.size());
    Vec mean(dimension_), var(dimension_);
    for (const auto& c : components_) {
        for (std::size_t i = 0; i < dimension_; ++i) {
            mean[i] = root * c.mean[i];
            var[i] = (kind_ == DistributionKind::GaussianMixture ? alpha_bar * c.cov_diag[i] : 0.0) +
                     (1.0 - alpha_bar);
        }
        logs.push_back(std::log(c.weight) + log_gaussian(x, mean, var));
    }
    return log_sum_exp(logs);
}

Vec LabeledDistribution::diffused_score(const Vec& x, double alpha_bar) const {
    check_dimension(x);
    if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) throw InvalidRange("alpha_bar outside (0,1]");
    if (kind_ == DistributionKind::PrototypeSet && alpha_bar == 1.0) {
        throw SingularMarginal("prototype marginal is singular at alpha_bar = 1");
    }
    const double root = std::sqrt(alpha_bar);
    const std::size_t k = components_.size();
    std::vector<double> logs(k);
    std::vector<Vec> grads(k, Vec(dimension_));
    Vec mean(dimension_), var(dimension_);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& c = components_[j];
        for (std::size_t i = 0; i < dimension_; ++i) {
            mean[i] = root * c.mean[i];
            var[i] = (kind_ == DistributionKind::GaussianMixture ? alpha_bar * c.cov_diag[i] : 0.0) +
                     (1.0 - alpha_bar);
        }
        logs[j] = std::log(c.weight) + log_gaussian(x, mean, var);
        for (std::size_t i = 0; i < dimension_; ++i) grads[j][i] = (mean[i] - x[i]) / var[i];
    }
    const double lse = log_sum_exp(logs);
    Vec score(dimension_, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const double resp = std::exp(logs[j] - lse);
        axpy(resp, grads[j], score);
    }
    return score;
}

int LabeledDistribution::bayes_classify(const Vec& x) const {
    check_dimension(x);
    std::map<int, std::vector<double>> per_label_logs;
    for (const auto& c : components_) {
        double lg;
        if (kind_ == DistributionKind::GaussianMixture) {
            lg = log_gaussian(x, c.mean, c.cov_diag);
        } else {
            lg = -0.5 * squared_distance(x, c.mean);  // unit kernel
        }
        per_label_logs[c.label].push_back(std::log(c.weight) + lg);
    }
    int best_label = 0;
    double best = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (const auto& [label, logs] : per_label_logs) {
        const double ev = log_sum_exp(logs);
        if (first || ev > best) {  // map iterates labels ascending: ties keep the smaller id
            best = ev;
            best_label = label;
            first = false;
        }
    }
    return best_label;
}

int LabeledDistribution::nearest_prototype_classify(const Vec& x) const {
    check_dimension(x);
    if (kind_ != DistributionKind::PrototypeSet) {
        throw UnsupportedKind("nearest_prototype_classify needs a prototype set");
    }
    double best = std::numeric_limits<double>::infinity();
    int best_label = 0;
    for (const auto& c : components_) {
        const double d = squared_distance(x, c.mean);
        if (d < best || (d == best && c.label < best_label)) {
            best = d;
            best_label = c.label;
        }
    }
    return best_label;
}

std::size_t LabeledDistribution::nearest_component(const Vec& x) const {
    check_dimension(x);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const double d = squared_distance(x, components_[j].mean);
        if (d < best) {
            best = d;
            best_idx = j;
        }
    }
    return best_idx;
}

Vec LabeledDistribution::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = components_.size() - 1;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        acc += components_[j].weight;
        if (u <= acc) {
            pick = j;
            break;
        }
    }
    Vec x = components_[pick].mean;
    if (kind_ == DistributionKind::GaussianMixture) {
        for (std::size_t i = 0; i < dimension_; ++i) {
            x[i] += std::sqrt(components_[pick].cov_diag[i]) * rng.normal();
        }
    }
    return x;
}

LabeledDistribution make_prototype_set(std::vector<Component> components) {
    return LabeledDistribution(DistributionKind::PrototypeSet, std::move(components));
}

LabeledDistribution make_gaussian_mixture(std::vector<Component> components) {
    return LabeledDistribution(DistributionKind::GaussianMixture, std::move(components));
}

}  // namespace purecert
