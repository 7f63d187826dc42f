#include "purecert/scoregap.hpp"

#include <cmath>
#include <cstring>
#include <map>

#include "purecert/errors.hpp"
#include "purecert/parallel.hpp"

namespace purecert {

void ScorePerturbation::validate(std::size_t dimension) const {
    if (magnitude < 0.0) throw InvalidRange("perturbation magnitude must be >= 0");
    if (kind == PerturbationKind::ConstantVector) {
        if (direction.size() != dimension) throw DimensionMismatch("perturbation direction dimension");
        if (magnitude > 0.0 && norm(direction) == 0.0) throw InvalidRange("zero perturbation direction");
    }
}

Vec ScorePerturbation::delta(const Vec& x, double tau) const {
    if (magnitude == 0.0) return Vec(x.size(), 0.0);
    switch (kind) {
        case PerturbationKind::ConstantVector: {
            Vec d = direction;
            const double scale = magnitude / norm(direction);
            for (auto& v : d) v *= scale;
            return d;
        }
        case PerturbationKind::ScaledNoise: {
            // deterministic pseudo-noise: a unit vector hashed from (x, tau)
            std::uint64_t h = mix64(static_cast<std::uint64_t>(tau * 1e9));
            for (double v : x) {
                std::uint64_t bits;
                std::memcpy(&bits, &v, sizeof(bits));
                h = mix64(h ^ bits);
            }
            Rng r(h);
            Vec d = r.normal_vec(x.size());
            const double scale = magnitude / norm(d);
            for (auto& v : d) v *= scale;
            return d;
        }
        case PerturbationKind::Radial: {
            const double n = norm(x);
            if (n == 0.0) return Vec(x.size(), 0.0);
            Vec d = x;
            const double scale = magnitude / n;
            for (auto& v : d) v *= scale;
            return d;
        }
    }
    throw InvalidRange("unknown perturbation kind");
}

JsmEstimate estimate_jsm(const LabeledDistribution& dist, const ScorePerturbation& pert, double t,
                         const NoiseSchedule& sched, std::size_t mc_samples, Rng rng,
                         double lambda_scale) {
    if (!(t > 0.0 && t <= 1.0)) throw InvalidRange("t outside (0,1]");
    if (mc_samples < 1000) throw InvalidRange("need mc_samples >= 1000");
    pert.validate(dist.dimension());

    std::vector<double> values(mc_samples);
    parallel_for(mc_samples, [&](std::size_t i) {
        Rng r = rng.split(i);
        const double tau = std::max(r.uniform() * t, 1e-12);
        const Vec x0 = dist.sample(r);
        const Vec x = forward_diffuse(x0, sched.alpha_bar_at(tau), r);
        const Vec d = pert.delta(x, tau);
        values[i] = 0.5 * lambda_scale * sched.gamma_at(tau) * norm2(d) * t;
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(mc_samples);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(mc_samples - 1);
    return {mean, std::sqrt(var / static_cast<double>(mc_samples)), mc_samples};
}

ScoreGapReport compare_endpoint_distributions(const LabeledDistribution& dist,
                                              const ScorePerturbation& pert, const Vec& x_a,
                                              double t, const NoiseSchedule& sched,
                                              std::size_t runs, std::size_t integrator_steps,
                                              Rng rng, std::size_t jsm_samples) {
    if (runs < 2000) throw InvalidRange("need runs >= 2000");
    pert.validate(dist.dimension());

    ScoreGapReport rep;
    rep.runs = runs;
    rep.jsm = estimate_jsm(dist, pert, t, sched, jsm_samples, rng.split(stream_tag("jsm")));

    const double root = std::sqrt(sched.alpha_bar_at(t));
    const Vec x_start = root * x_a;
    ReverseConfig cfg;
    cfg.mode = ReverseMode::ExactSde;
    cfg.integrator_steps = integrator_steps;

    const ScoreFn exact = exact_score_fn(dist, sched);
    const ScoreFn perturbed = [&dist, &sched, &pert](const Vec& x, double tau) {
        Vec s = dist.diffused_score(x, sched.alpha_bar_at(tau));
        const Vec d = pert.delta(x, tau);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += d[i];
        return s;
    };

    auto label_of = [&](const Vec& endpoint) {
        return dist.kind() == DistributionKind::PrototypeSet
                   ? dist.nearest_prototype_classify(endpoint)
                   : dist.bayes_classify(endpoint);
    };

    const Rng base_e = rng.split(stream_tag("exact"));
    const Rng base_p = rng.split(stream_tag("perturbed"));
    std::vector<int> labels_e(runs), labels_p(runs);
    parallel_for(runs, [&](std::size_t i) {
        Rng re = base_e.split(i);
        labels_e[i] = label_of(reverse_sde_exact(exact, sched, x_start, t, cfg, re));
        Rng rp = base_p.split(i);
        labels_p[i] = label_of(reverse_sde_exact(perturbed, sched, x_start, t, cfg, rp));
    });

    std::map<int, double> freq_e, freq_p;
    for (int l : labels_e) freq_e[l] += 1.0;
    for (int l : labels_p) freq_p[l] += 1.0;
    double tv = 0.0;
    for (int l : dist.labels()) {
        const double pe = (freq_e.count(l) ? freq_e[l] : 0.0) / static_cast<double>(runs);
        const double pp = (freq_p.count(l) ? freq_p[l] : 0.0) / static_cast<double>(runs);
        tv += std::abs(pe - pp);
    }
    rep.endpoint_tv = 0.5 * tv;
    const double m = static_cast<double>(dist.labels().size());
    rep.tv_stderr = std::sqrt(m / (4.0 * static_cast<double>(runs))) * 2.0;
    return rep;
}

}  // namespace purecert
