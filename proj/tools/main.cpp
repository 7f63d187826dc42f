#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "purecert/certify.hpp"
#include "purecert/config.hpp"
#include "purecert/errors.hpp"
#include "purecert/geometry.hpp"
#include "purecert/parallel.hpp"
#include "purecert/posterior.hpp"
#include "purecert/sampler.hpp"
#include "purecert/scoregap.hpp"
#include "purecert/vec.hpp"

namespace fs = std::filesystem;
using namespace purecert;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string short_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << content;
    if (!out) throw IoFailure("write failed for " + path.string());
}

struct RunContext {
    ExperimentConfig cfg;
    fs::path out_dir;
    std::uint64_t hash = 0;
};

const LabeledDistribution& need_distribution(const RunContext& ctx) {
    if (!ctx.cfg.distribution) throw ConfigInvalid("a distribution section is required");
    return *ctx.cfg.distribution;
}

const NoiseSchedule& need_schedule(const RunContext& ctx) {
    if (!ctx.cfg.schedule) throw ConfigInvalid("a schedule section is required");
    return *ctx.cfg.schedule;
}

const Json& need_section(const RunContext& ctx, const std::string& name) {
    if (!ctx.cfg.raw.contains(name)) throw ConfigInvalid("a '" + name + "' section is required");
    return ctx.cfg.raw.at(name);
}

// One reverse run per the configured mode (mirrors the certification driver).
Vec run_reverse(const LabeledDistribution& dist, const Vec& x_scaled, std::size_t n_star,
                const NoiseSchedule& sched, const ReverseConfig& rcfg, Rng& rng) {
    const EpsilonPredictor eps = exact_epsilon_predictor(dist);
    switch (rcfg.mode) {
        case ReverseMode::ExactSde:
            return reverse_sde_exact(exact_score_fn(dist, sched), sched, x_scaled,
                                     sched.time_of(n_star), rcfg, rng);
        case ReverseMode::DdpmAncestral:
            return reverse_ddpm(x_scaled, build_subschedule(sched, n_star, n_star), eps, rng,
                                rcfg.variance);
        case ReverseMode::DdpmFast:
            return reverse_ddpm(x_scaled,
                                build_subschedule(sched, n_star, std::min(rcfg.sub_steps, n_star)),
                                eps, rng, rcfg.variance);
        case ReverseMode::OneShot:
            return one_shot_denoise(x_scaled, n_star, sched, eps);
    }
    throw InvalidRange("unknown reverse mode");
}

std::vector<std::string> cmd_posterior(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const Json& sec = need_section(ctx, "posterior");
    const Vec anchor = sec.at("anchor").get<Vec>();
    const double sigma_t = sec.at("sigma_t").get<double>();
    const auto post = build_posterior(dist, anchor, sigma_t);
    const auto mode = highest_density_point(post);

    std::ostringstream csv;
    const std::size_t d = dist.dimension();
    csv << "index,label,weight";
    for (std::size_t i = 0; i < d; ++i) csv << ",mean_" << i;
    for (std::size_t i = 0; i < d; ++i) csv << ",cov_" << i;
    csv << "\n";
    for (std::size_t k = 0; k < post.weights().size(); ++k) {
        const auto& pc = post.posterior_components()[k];
        csv << k << "," << pc.label << "," << fmt(post.weights()[k]);
        for (std::size_t i = 0; i < d; ++i) csv << "," << fmt(pc.mean[i]);
        for (std::size_t i = 0; i < d; ++i)
            csv << "," << fmt(pc.cov_diag.empty() ? 0.0 : pc.cov_diag[i]);
        csv << "\n";
    }
    write_text(ctx.out_dir / "posterior.csv", csv.str());

    std::ostringstream sum;
    sum << "argmax_label,runner_up_label,log_density_gap";
    for (std::size_t i = 0; i < d; ++i) sum << ",argmax_" << i;
    sum << "\n" << mode.argmax_label << "," << mode.runner_up_label << ","
        << fmt(mode.log_density_gap);
    for (std::size_t i = 0; i < d; ++i) sum << "," << fmt(mode.argmax_point[i]);
    sum << "\n";
    write_text(ctx.out_dir / "posterior_mode.csv", sum.str());
    return {"posterior.csv", "posterior_mode.csv"};
}

std::vector<std::string> cmd_region(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const Json& sec = need_section(ctx, "region");
    const std::size_t x0_index = sec.at("x0_index").get<std::size_t>();
    const double sigma_t = sec.at("sigma_t").get<double>();
    const std::size_t directions = sec.value("direction_count", 512);
    const auto region = build_region(dist, x0_index, sigma_t);

    std::ostringstream hs;
    hs << "sub_index,other_index,normal_0,normal_1,offset,anchor_0,anchor_1\n";
    for (const auto& [idx, spaces] : region.sub_regions()) {
        for (const auto& h : spaces) {
            hs << idx << "," << h.other_index << "," << fmt(h.normal[0]) << "," << fmt(h.normal[1])
               << "," << fmt(h.offset) << "," << fmt(h.anchor[0]) << "," << fmt(h.anchor[1])
               << "\n";
        }
    }
    write_text(ctx.out_dir / "halfspaces.csv", hs.str());

    const Json& grid = sec.at("grid");
    const Vec lo = grid.at("min").get<Vec>();
    const Vec hi = grid.at("max").get<Vec>();
    const std::size_t cells = grid.at("cells").get<std::size_t>();
    if (cells < 2) throw ConfigInvalid("grid.cells must be >= 2");
    std::ostringstream gs;
    gs << "x,y,in_union\n";
    for (std::size_t iy = 0; iy < cells; ++iy) {
        for (std::size_t ix = 0; ix < cells; ++ix) {
            const double x = lo[0] + (hi[0] - lo[0]) * static_cast<double>(ix) /
                                         static_cast<double>(cells - 1);
            const double y = lo[1] + (hi[1] - lo[1]) * static_cast<double>(iy) /
                                         static_cast<double>(cells - 1);
            const bool in = region.membership({x, y}).status == Membership::InUnion;
            gs << fmt(x) << "," << fmt(y) << "," << (in ? 1 : 0) << "\n";
        }
    }
    write_text(ctx.out_dir / "grid.csv", gs.str());

    const Vec& x0 = dist.components()[x0_index].mean;
    const double r_sub = region.sub_region_radius(x0_index);
    const auto est = region.union_radius(x0, directions, 1e-6);
    std::ostringstream sum;
    sum << "x0_index,label,sub_region_radius,union_radius,any_unbounded\n"
        << x0_index << "," << region.label() << "," << fmt(r_sub) << "," << fmt(est.radius) << ","
        << (est.any_unbounded ? 1 : 0) << "\n";
    write_text(ctx.out_dir / "region_summary.csv", sum.str());
    return {"halfspaces.csv", "grid.csv", "region_summary.csv"};
}

Json result_json(const CertificationResult& r) {
    Json counts = Json::object();
    for (const auto& [label, count] : r.counts) counts[std::to_string(label)] = count;
    return Json{{"input", r.input},
                {"predicted_label", r.predicted_label},
                {"pa_lower", r.pa_lower},
                {"radius", r.radius},
                {"counts", counts},
                {"seed", r.seed}};
}

std::vector<std::string> cmd_certify(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const auto& sched = need_schedule(ctx);
    if (ctx.cfg.points.empty()) throw ConfigInvalid("certify needs a non-empty points list");
    const auto batch =
        certify_batch(dist, ctx.cfg.classifier, ctx.cfg.points, ctx.cfg.point_labels,
                      ctx.cfg.smoothing, sched, ctx.cfg.reverse, ctx.cfg.seed, ctx.cfg.epsilons);

    std::ostringstream jsonl;
    for (const auto& r : batch.results) jsonl << result_json(r).dump() << "\n";
    write_text(ctx.out_dir / "certify.jsonl", jsonl.str());

    std::ostringstream curve;
    curve << "epsilon,certified_accuracy\n";
    for (const auto& p : batch.curve)
        curve << fmt(p.epsilon) << "," << fmt(p.certified_accuracy) << "\n";
    write_text(ctx.out_dir / "curve.csv", curve.str());
    return {"certify.jsonl", "curve.csv"};
}

std::vector<std::string> cmd_sample(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const auto& sched = need_schedule(ctx);
    const Json& sec = need_section(ctx, "sample");
    const Vec anchor = sec.at("anchor").get<Vec>();
    const std::size_t runs = sec.at("runs").get<std::size_t>();
    const double sigma = sec.value("sigma", ctx.cfg.smoothing.sigma);
    if (runs == 0) throw ConfigInvalid("sample.runs must be positive");

    const auto map = map_sigma_to_timestep(sched, sigma);
    const Vec x_scaled = std::sqrt(map.achieved_alpha_bar) * anchor;
    const Rng base = Rng(ctx.cfg.seed).split(stream_tag("sample"));
    std::vector<Vec> endpoints(runs);
    parallel_for(runs, [&](std::size_t i) {
        Rng r = base.split(i);
        endpoints[i] = run_reverse(dist, x_scaled, map.n_star, sched, ctx.cfg.reverse, r);
    });

    std::ostringstream csv;
    const std::size_t d = dist.dimension();
    csv << "run";
    for (std::size_t i = 0; i < d; ++i) csv << ",x_" << i;
    csv << ",component,label\n";
    for (std::size_t i = 0; i < runs; ++i) {
        csv << i;
        for (std::size_t k = 0; k < d; ++k) csv << "," << fmt(endpoints[i][k]);
        const std::size_t comp = dist.nearest_component(endpoints[i]);
        csv << "," << comp << "," << classify(dist, ctx.cfg.classifier, endpoints[i]) << "\n";
    }
    write_text(ctx.out_dir / "endpoints.csv", csv.str());
    return {"endpoints.csv"};
}

std::vector<std::string> cmd_scoregap(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const auto& sched = need_schedule(ctx);
    const Json& sec = need_section(ctx, "scoregap");
    const Vec anchor = sec.at("anchor").get<Vec>();
    const double t = sec.at("t").get<double>();
    const std::vector<double> mags = sec.at("magnitudes").get<std::vector<double>>();
    const std::size_t runs = sec.value("runs", 3000);
    const std::size_t steps = sec.value("integrator_steps", 300);
    const std::size_t jsm_samples = sec.value("jsm_samples", 20000);

    ScorePerturbation pert;
    const std::string kind = sec.value("kind", std::string("constant-vector"));
    if (kind == "constant-vector") {
        pert.kind = PerturbationKind::ConstantVector;
        pert.direction = sec.at("direction").get<Vec>();
    } else if (kind == "scaled-noise") {
        pert.kind = PerturbationKind::ScaledNoise;
    } else if (kind == "radial") {
        pert.kind = PerturbationKind::Radial;
    } else {
        throw ConfigInvalid("unknown perturbation kind: " + kind);
    }

    std::ostringstream csv;
    csv << "magnitude,j_sm,j_sm_stderr,endpoint_tv,tv_stderr\n";
    const Rng base = Rng(ctx.cfg.seed).split(stream_tag("scoregap"));
    for (std::size_t m = 0; m < mags.size(); ++m) {
        pert.magnitude = mags[m];
        const auto rep = compare_endpoint_distributions(dist, pert, anchor, t, sched, runs, steps,
                                                        base.split(m), jsm_samples);
        csv << fmt(mags[m]) << "," << fmt(rep.jsm.value) << "," << fmt(rep.jsm.stderr_) << ","
            << fmt(rep.endpoint_tv) << "," << fmt(rep.tv_stderr) << "\n";
    }
    write_text(ctx.out_dir / "scoregap.csv", csv.str());
    return {"scoregap.csv"};
}

std::vector<std::string> cmd_sweep(const RunContext& ctx) {
    const auto& dist = need_distribution(ctx);
    const auto& sched = need_schedule(ctx);
    const Json& sec = need_section(ctx, "sweep");
    if (ctx.cfg.points.empty()) throw ConfigInvalid("sweep needs a non-empty points list");
    const std::string param = sec.at("parameter").get<std::string>();
    const std::vector<double> values = sec.at("values").get<std::vector<double>>();
    if (values.empty()) throw ConfigInvalid("sweep.values must be non-empty");

    std::vector<std::string> files;
    std::ostringstream merged;
    merged << param << ",epsilon,certified_accuracy\n";
    const Rng base = Rng(ctx.cfg.seed).split(stream_tag("sweep"));
    for (std::size_t k = 0; k < values.size(); ++k) {
        SmoothingParams p = ctx.cfg.smoothing;
        if (param == "sigma") {
            p.sigma = values[k];
        } else if (param == "K") {
            p.k_votes = static_cast<std::size_t>(values[k]);
        } else if (param == "b") {
            p.b = static_cast<std::size_t>(values[k]);
        } else {
            throw ConfigInvalid("sweep.parameter must be one of sigma, K, b");
        }
        const auto batch = certify_batch(dist, ctx.cfg.classifier, ctx.cfg.points,
                                         ctx.cfg.point_labels, p, sched, ctx.cfg.reverse,
                                         base.split(k).next_u64(), ctx.cfg.epsilons);
        std::ostringstream curve;
        curve << "epsilon,certified_accuracy\n";
        for (const auto& pt : batch.curve) {
            curve << fmt(pt.epsilon) << "," << fmt(pt.certified_accuracy) << "\n";
            merged << short_fmt(values[k]) << "," << fmt(pt.epsilon) << ","
                   << fmt(pt.certified_accuracy) << "\n";
        }
        const std::string name = "curve_" + param + "_" + short_fmt(values[k]) + ".csv";
        write_text(ctx.out_dir / name, curve.str());
        files.push_back(name);
    }
    write_text(ctx.out_dir / "sweep_summary.csv", merged.str());
    files.push_back("sweep_summary.csv");
    return files;
}

int run_command(const std::string& name, const std::string& config_path,
                const std::vector<std::string>& overrides, const std::string& out_override,
                std::uint64_t seed_override, bool has_seed_override) {
    Json doc = read_json_file(config_path);
    for (const auto& o : overrides) apply_override(doc, o);
    if (has_seed_override) doc["seed"] = seed_override;

    if (name == "validate") {
        const auto errors = validate_config(doc);
        if (errors.empty()) {
            std::cout << "ok\n";
            return 0;
        }
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 2;
    }

    RunContext ctx;
    try {
        ctx.cfg = parse_config(doc);
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::invalid_argument& e) {
        // invariant violations surfaced while building the configured objects
        throw ConfigInvalid(e.what());
    }
    ctx.out_dir = out_override.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(out_override);
    ctx.hash = config_hash(doc);
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw IoFailure("cannot create output directory " + ctx.out_dir.string());

    const std::string started = utc_now();
    std::vector<std::string> outputs;
    if (name == "posterior") outputs = cmd_posterior(ctx);
    else if (name == "region") outputs = cmd_region(ctx);
    else if (name == "certify") outputs = cmd_certify(ctx);
    else if (name == "sample") outputs = cmd_sample(ctx);
    else if (name == "scoregap") outputs = cmd_scoregap(ctx);
    else if (name == "sweep") outputs = cmd_sweep(ctx);
    else throw ConfigInvalid("unknown subcommand: " + name);

    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(ctx.hash));
    const Json manifest{{"config_hash", hash_hex},
                        {"tool_version", kVersion},
                        {"subcommand", name},
                        {"started_at", started},
                        {"finished_at", utc_now()},
                        {"outputs", outputs}};
    write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
    for (const auto& f : outputs) std::cout << (ctx.out_dir / f).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified-robustness laboratory for diffusion-denoised smoothing"};
    app.set_version_flag("--version", std::string("purecert ") + kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed_override = 0;
    int threads = 0;

    const std::vector<std::string> names{"posterior", "region", "certify", "sample",
                                         "scoregap",  "sweep",  "validate"};
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--set", overrides, "dotted-path config override key=value");
        sub->add_option("--seed", seed_override, "master seed override");
        sub->add_option("--threads", threads, "worker count for parallel sections");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        if (threads > 0) set_worker_count(threads);
        const bool has_seed = active->count("--seed") > 0;
        return run_command(active->get_name(), config_path, overrides, out_dir, seed_override,
                           has_seed);
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoFailure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    }
}
