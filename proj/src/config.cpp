#include "purecert/config.hpp"

#include <fstream>
#include <sstream>

#include "purecert/errors.hpp"

namespace purecert {

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigInvalid(path + ": " + e.what());
    }
    return doc;
}

LabeledDistribution parse_distribution(const Json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    const std::size_t dim = spec.at("dimension").get<std::size_t>();
    std::vector<Component> comps;
    for (const auto& c : spec.at("components")) {
        Component comp;
        comp.weight = c.contains("weight") ? c.at("weight").get<double>()
                                           : c.at("mass").get<double>();
        const auto& pos = c.contains("mean") ? c.at("mean") : c.at("position");
        comp.mean = pos.get<Vec>();
        comp.label = c.at("label").get<int>();
        if (c.contains("cov")) {
            if (c.at("cov").is_number()) {
                comp.cov_diag.assign(dim, c.at("cov").get<double>());
            } else {
                comp.cov_diag = c.at("cov").get<Vec>();
            }
        }
        comps.push_back(std::move(comp));
    }
    LabeledDistribution dist = kind == "prototype-set"
                                   ? make_prototype_set(std::move(comps))
                                   : kind == "gaussian-mixture"
                                         ? make_gaussian_mixture(std::move(comps))
                                         : throw ConfigInvalid("unknown distribution kind: " + kind);
    if (dist.dimension() != dim) throw ConfigInvalid("declared dimension does not match components");
    return dist;
}

NoiseSchedule parse_schedule(const Json& spec) {
    if (spec.contains("betas")) {
        return NoiseSchedule(spec.at("betas").get<std::vector<double>>());
    }
    return build_linear_schedule(spec.at("N").get<std::size_t>(),
                                 spec.at("beta_min").get<double>(),
                                 spec.at("beta_max").get<double>());
}

namespace {

ReverseMode parse_mode(const std::string& s) {
    if (s == "exact-sde") return ReverseMode::ExactSde;
    if (s == "ddpm-ancestral") return ReverseMode::DdpmAncestral;
    if (s == "ddpm-fast") return ReverseMode::DdpmFast;
    if (s == "one-shot") return ReverseMode::OneShot;
    throw ConfigInvalid("unknown reverse mode: " + s);
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
    ExperimentConfig cfg;
    cfg.raw = doc;
    if (!doc.contains("seed")) throw ConfigInvalid("master seed is required");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();

    if (doc.contains("distribution")) {
        const Json& d = doc.at("distribution");
        cfg.distribution = d.contains("file") ? parse_distribution(read_json_file(d.at("file")))
                                              : parse_distribution(d);
    }
    if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc.at("schedule"));

    if (doc.contains("smoothing")) {
        const Json& s = doc.at("smoothing");
        auto& p = cfg.smoothing;
        if (s.contains("sigma")) p.sigma = s.at("sigma").get<double>();
        if (s.contains("n0")) p.n0 = s.at("n0").get<std::size_t>();
        if (s.contains("n")) p.n = s.at("n").get<std::size_t>();
        if (s.contains("alpha")) p.alpha = s.at("alpha").get<double>();
        if (s.contains("K")) p.k_votes = s.at("K").get<std::size_t>();
        if (s.contains("b")) p.b = s.at("b").get<std::size_t>();
        p.validate();
    }
    if (doc.contains("reverse")) {
        const Json& r = doc.at("reverse");
        if (r.contains("mode")) cfg.reverse.mode = parse_mode(r.at("mode").get<std::string>());
        if (r.contains("integrator_steps"))
            cfg.reverse.integrator_steps = r.at("integrator_steps").get<std::size_t>();
        if (r.contains("sub_steps")) cfg.reverse.sub_steps = r.at("sub_steps").get<std::size_t>();
        if (r.contains("variance")) {
            const std::string v = r.at("variance").get<std::string>();
            if (v == "beta") cfg.reverse.variance = StepVariance::Beta;
            else if (v == "beta-tilde") cfg.reverse.variance = StepVariance::BetaTilde;
            else throw ConfigInvalid("unknown step variance: " + v);
        }
        if (cfg.reverse.mode == ReverseMode::ExactSde && cfg.reverse.integrator_steps < 10) {
            throw ConfigInvalid("exact-sde needs integrator_steps >= 10");
        }
    }
    if (doc.contains("classifier")) {
        const std::string c = doc.at("classifier").get<std::string>();
        if (c == "bayes") cfg.classifier = ClassifierKind::Bayes;
        else if (c == "nearest-prototype") cfg.classifier = ClassifierKind::NearestPrototype;
        else throw ConfigInvalid("unknown classifier: " + c);
    }
    if (doc.contains("points")) {
        for (const auto& p : doc.at("points")) {
            cfg.points.push_back(p.at("x").get<Vec>());
            cfg.point_labels.push_back(p.at("label").get<int>());
        }
    }
    if (doc.contains("epsilons")) cfg.epsilons = doc.at("epsilons").get<std::vector<double>>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_json_file(path));
}

std::vector<std::string> validate_config(const Json& doc) {
    std::vector<std::string> errors;
    try {
        parse_config(doc);
    } catch (const std::exception& e) {
        errors.push_back(e.what());
        return errors;
    }
    return errors;
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigInvalid("override must be key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    Json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigInvalid("empty override path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    Json parsed = Json::parse(value, nullptr, false);
    (*node)[parts.back()] = parsed.is_discarded() ? Json(value) : parsed;
}

std::uint64_t config_hash(const Json& doc) {
    const std::string canonical = doc.dump();  // object keys are sorted
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace purecert
