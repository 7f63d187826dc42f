#include "purecert/geometry.hpp"

#include <cmath>

#include "purecert/errors.hpp"
#include "purecert/rng.hpp"

namespace purecert {

namespace {
constexpr double kBoundaryBand = 1e-12;
}

RobustRegion::RobustRegion(const LabeledDistribution& dist, std::size_t x0_index, double sigma_t)
    : dist_(&dist), x0_index_(x0_index), sigma_t_(sigma_t) {
    if (dist.kind() != DistributionKind::PrototypeSet) {
        throw UnsupportedKind("robust regions are defined over prototype sets");
    }
    const auto& comps = dist.components();
    if (x0_index >= comps.size()) throw InvalidRange("x0_index out of range");
    label_ = comps[x0_index].label;
    for (const auto& c : comps) {
        if (!(c.weight > 0.0)) throw ZeroMass("all prototype masses must be positive");
    }
    const double s2 = sigma_t * sigma_t;
    bool any_other = false;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (comps[i].label != label_) {
            any_other = true;
            continue;
        }
        std::vector<HalfSpace> hs;
        for (std::size_t j = 0; j < comps.size(); ++j) {
            if (comps[j].label == label_) continue;
            HalfSpace h;
            h.anchor = comps[i].mean;
            h.normal = comps[j].mean - comps[i].mean;
            h.offset = s2 * std::log(comps[i].weight / comps[j].weight) +
                       0.5 * norm2(h.normal);
            h.other_index = j;
            hs.push_back(std::move(h));
        }
        subs_[i] = std::move(hs);
    }
    if (!any_other) throw NoOtherLabels("need at least one different-label prototype");
}

bool RobustRegion::in_sub_region(std::size_t proto_index, const Vec& x_a) const {
    const auto it = subs_.find(proto_index);
    if (it == subs_.end()) throw InvalidRange("not a same-label prototype index");
    for (const auto& h : it->second) {
        const double lhs = dot(x_a - h.anchor, h.normal);
        if (!(lhs < h.offset - kBoundaryBand)) return false;  // strict, band outside
    }
    return true;
}

MembershipResult RobustRegion::membership(const Vec& x_a) const {
    if (x_a.size() != dist_->dimension()) throw DimensionMismatch("query dimension mismatch");
    MembershipResult res;
    for (const auto& [idx, hs] : subs_) {
        if (in_sub_region(idx, x_a)) res.containing_subregions.push_back(idx);
    }
    if (!res.containing_subregions.empty()) res.status = Membership::InUnion;
    return res;
}

double RobustRegion::sub_region_radius(std::size_t proto_index, const Vec& center) const {
    const auto it = subs_.find(proto_index);
    if (it == subs_.end()) throw InvalidRange("not a same-label prototype index");
    double r = std::numeric_limits<double>::infinity();
    for (const auto& h : it->second) {
        const double slack = h.offset - dot(center - h.anchor, h.normal);
        r = std::min(r, slack / norm(h.normal));
    }
    return std::max(r, 0.0);
}

double RobustRegion::sub_region_radius(std::size_t proto_index) const {
    return sub_region_radius(proto_index, dist_->components()[proto_index].mean);
}

RobustRegion::UnionRadiusEstimate RobustRegion::union_radius(const Vec& x0,
                                                             std::size_t direction_count,
                                                             double tol, double cap) const {
    if (direction_count < 64) throw InvalidRange("direction_count must be >= 64");
    if (membership(x0).status == Membership::Outside) throw CenterOutside("center is outside the union");

    const std::size_t d = dist_->dimension();
    UnionRadiusEstimate est;
    est.radius = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < direction_count; ++k) {
        Vec u(d);
        if (d == 2) {
            // angles 2*pi*k/count: doubling the count keeps every old direction
            const double a = 6.283185307179586 * static_cast<double>(k) /
                             static_cast<double>(direction_count);
            u[0] = std::cos(a);
            u[1] = std::sin(a);
        } else {
            Rng r(mix64(0x5eedULL) ^ k);
            u = r.normal_vec(d);
            const double n = norm(u);
            for (auto& v : u) v /= n;
        }
        // march outward to bracket the first exit, then bisect
        double r_lo = 0.0;
        double r_hi = -1.0;
        double r = tol;
        while (r <= cap) {
            Vec p = x0;
            axpy(r, u, p);
            if (membership(p).status == Membership::Outside) {
                r_hi = r;
                break;
            }
            r_lo = r;
            r *= 1.25;
        }
        if (r_hi < 0.0) {
            est.any_unbounded = true;
            continue;
        }
        while (r_hi - r_lo > tol) {
            const double mid = 0.5 * (r_lo + r_hi);
            Vec p = x0;
            axpy(mid, u, p);
            if (membership(p).status == Membership::Outside) {
                r_hi = mid;
            } else {
                r_lo = mid;
            }
        }
        if (r_lo < est.radius) {
            est.radius = r_lo;
            est.direction = u;
        }
    }
    if (!std::isfinite(est.radius)) est.radius = cap;  // union unbounded in all directions
    return est;
}

RobustRegion build_region(const LabeledDistribution& dist, std::size_t x0_index, double sigma_t) {
    return RobustRegion(dist, x0_index, sigma_t);
}

}  // namespace purecert
