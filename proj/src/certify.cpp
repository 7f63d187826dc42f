#include "purecert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "purecert/errors.hpp"
#include "purecert/parallel.hpp"

namespace purecert {

void SmoothingParams::validate() const {
    if (!(sigma > 0.0)) throw InvalidRange("sigma must be positive");
    if (n0 < 10) throw InvalidRange("n0 must be >= 10");
    if (n < n0) throw InvalidRange("n must be >= n0");
    if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidRange("alpha outside (0, 0.5)");
    if (k_votes < 1) throw InvalidRange("K must be >= 1");
    if (b < 1) throw InvalidRange("b must be >= 1");
}

int classify(const LabeledDistribution& dist, ClassifierKind kind, const Vec& x) {
    return kind == ClassifierKind::Bayes ? dist.bayes_classify(x)
                                         : dist.nearest_prototype_classify(x);
}

namespace {

int majority(const std::map<int, std::size_t>& votes) {
    int best = 0;
    std::size_t best_count = 0;
    bool first = true;
    for (const auto& [label, count] : votes) {  // ascending labels: ties keep the smaller
        if (first || count > best_count) {
            best = label;
            best_count = count;
            first = false;
        }
    }
    return best;
}

// One reverse run from the scaled start, per the configured mode.
Vec run_reverse(const LabeledDistribution& dist, const Vec& x_scaled, std::size_t n_star,
                const NoiseSchedule& sched, const ReverseConfig& rcfg,
                const EpsilonPredictor& eps, Rng& rng) {
    switch (rcfg.mode) {
        case ReverseMode::ExactSde: {
            const ScoreFn score = exact_score_fn(dist, sched);
            return reverse_sde_exact(score, sched, x_scaled, sched.time_of(n_star), rcfg, rng);
        }
        case ReverseMode::DdpmAncestral: {
            const SubSchedule sub = build_subschedule(sched, n_star, n_star);
            return reverse_ddpm(x_scaled, sub, eps, rng, rcfg.variance);
        }
        case ReverseMode::DdpmFast: {
            const SubSchedule sub =
                build_subschedule(sched, n_star, std::min(rcfg.sub_steps, n_star));
            return reverse_ddpm(x_scaled, sub, eps, rng, rcfg.variance);
        }
        case ReverseMode::OneShot:
            return one_shot_denoise(x_scaled, n_star, sched, eps);
    }
    throw InvalidRange("unknown reverse mode");
}

}  // namespace

int denoised_predict_one(const LabeledDistribution& dist, ClassifierKind classifier,
                          const Vec& x_rs, const SmoothingParams& params,
                          const NoiseSchedule& sched, const ReverseConfig& rcfg, Rng rng) {
    params.validate();
    const SigmaTimestepMap map = map_sigma_to_timestep(sched, params.sigma);
    const double root = std::sqrt(map.achieved_alpha_bar);
    const Vec x_scaled = root * x_rs;
    const EpsilonPredictor eps = exact_epsilon_predictor(dist);

    ReverseConfig cfg = rcfg;
    cfg.sub_steps = params.b;
    if (params.b == 1 && cfg.mode == ReverseMode::DdpmFast) cfg.mode = ReverseMode::OneShot;

    std::map<int, std::size_t> votes;
    for (std::size_t k = 0; k < params.k_votes; ++k) {
        Rng run_rng = rng.split(k);
        const Vec endpoint = run_reverse(dist, x_scaled, map.n_star, sched, cfg, eps, run_rng);
        votes[classify(dist, classifier, endpoint)]++;
    }
    return majority(votes);
}

CertificationResult certify(const LabeledDistribution& dist, ClassifierKind classifier,
                            const Vec& x0, const SmoothingParams& params,
                            const NoiseSchedule& sched, const ReverseConfig& rcfg,
                            std::uint64_t seed) {
    params.validate();
    CertificationResult res;
    res.input = x0;
    res.seed = seed;
    res.params = params;

    const Rng base(seed);
    const Rng noise_base = base.split(stream_tag("rs-noise"));
    const Rng predict_base = base.split(stream_tag("predict"));

    auto draw_label = [&](std::uint64_t index) {
        Rng noise_rng = noise_base.split(index);
        Vec x_rs = x0;
        for (auto& v : x_rs) v += params.sigma * noise_rng.normal();
        return denoised_predict_one(dist, classifier, x_rs, params, sched, rcfg,
                                     predict_base.split(index));
    };

    // phase 1: candidate selection on n0 draws
    std::vector<int> labels0(params.n0);
    parallel_for(params.n0, [&](std::size_t i) { labels0[i] = draw_label(i); });
    std::map<int, std::size_t> tally0;
    for (int l : labels0) tally0[l]++;
    const int candidate = majority(tally0);

    // phase 2: success count on n fresh draws (disjoint stream indices)
    std::vector<int> labels1(params.n);
    parallel_for(params.n, [&](std::size_t i) { labels1[i] = draw_label(params.n0 + i); });
    std::map<int, std::size_t> tally;
    for (int l : labels1) tally[l]++;
    res.counts.assign(tally.begin(), tally.end());

    const std::size_t successes = tally.count(candidate) ? tally.at(candidate) : 0;
    res.pa_lower = clopper_pearson_lower(successes, params.n, params.alpha);
    if (res.pa_lower > 0.5) {
        res.predicted_label = candidate;
        res.radius = params.sigma * normal_quantile(res.pa_lower);
    } else {
        res.predicted_label = kAbstain;
        res.radius = 0.0;
    }
    return res;
}

double two_class_radius(double sigma, double pa_lower, double pb_upper) {
    return 0.5 * sigma * (normal_quantile(pa_lower) - normal_quantile(pb_upper));
}

BatchResult certify_batch(const LabeledDistribution& dist, ClassifierKind classifier,
                          const std::vector<Vec>& points, const std::vector<int>& correct_labels,
                          const SmoothingParams& params, const NoiseSchedule& sched,
                          const ReverseConfig& rcfg, std::uint64_t seed,
                          const std::vector<double>& epsilons) {
    if (points.empty()) throw InvalidRange("certify_batch needs at least one point");
    if (points.size() != correct_labels.size()) throw InvalidRange("labels/points size mismatch");
    BatchResult batch;
    batch.results.resize(points.size());
    const Rng base(seed);
    for (std::size_t i = 0; i < points.size(); ++i) {
        batch.results[i] =
            certify(dist, classifier, points[i], params, sched, rcfg,
                    base.split(stream_tag("certify-point")).split(i).next_u64());
    }
    for (double eps : epsilons) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& r = batch.results[i];
            if (r.predicted_label == correct_labels[i] && r.radius >= eps) hits++;
        }
        batch.curve.push_back(
            {eps, static_cast<double>(hits) / static_cast<double>(points.size())});
    }
    return batch;
}

}  // namespace purecert
