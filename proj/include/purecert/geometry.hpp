#pragma once

#include <map>
#include <vector>

#include "purecert/distribution.hpp"
#include "purecert/vec.hpp"

namespace purecert {

// Half-space constraint (x_a - anchor)^T normal < offset, one per
// different-label prototype. normal = x'_0 - anchor; offset =
// sigma_t^2 log(p(anchor)/p(x'_0)) + ||x'_0 - anchor||^2 / 2.
struct HalfSpace {
    Vec normal;
    double offset = 0.0;
    Vec anchor;
    std::size_t other_index = 0;  // the different-label prototype
};

enum class Membership { Outside, InUnion };

struct MembershipResult {
    Membership status = Membership::Outside;
    std::vector<std::size_t> containing_subregions;  // same-label prototype indices
};

// Robust region of a prototype's label: one convex sub-region (half-space
// intersection) per same-label prototype, union over them. Strict-inequality
// semantics with a 1e-12 boundary band counted as outside.
class RobustRegion {
  public:
    RobustRegion(const LabeledDistribution& dist, std::size_t x0_index, double sigma_t);

    int label() const { return label_; }
    double sigma_t() const { return sigma_t_; }
    std::size_t x0_index() const { return x0_index_; }
    const std::map<std::size_t, std::vector<HalfSpace>>& sub_regions() const { return subs_; }

    MembershipResult membership(const Vec& x_a) const;
    bool in_sub_region(std::size_t proto_index, const Vec& x_a) const;

    // Exact distance from `center` to the boundary of one convex sub-region
    // (min point-to-plane distance over its half-spaces, clamped at 0).
    double sub_region_radius(std::size_t proto_index, const Vec& center) const;
    double sub_region_radius(std::size_t proto_index) const;  // centered at the prototype

    struct UnionRadiusEstimate {
        double radius = 0.0;
        Vec direction;            // direction achieving the minimum
        bool any_unbounded = false;  // some direction never left the union (capped)
    };

    // Directional bisection estimate of the maximum inscribed ball of the
    // union, centered at x0. Directions are quasi-uniform on the sphere.
    UnionRadiusEstimate union_radius(const Vec& x0, std::size_t direction_count, double tol,
                                     double cap = 1e4) const;

  private:
    const LabeledDistribution* dist_;
    std::size_t x0_index_;
    int label_;
    double sigma_t_;
    std::map<std::size_t, std::vector<HalfSpace>> subs_;
};

RobustRegion build_region(const LabeledDistribution& dist, std::size_t x0_index, double sigma_t);

}  // namespace purecert
