#ifndef CONEWALK_CONE_HPP
#define CONEWALK_CONE_HPP

#include <string>
#include <variant>
#include <vector>

#include "conewalk/error.hpp"
#include "conewalk/walk_model.hpp"

namespace cw {

// The cone K is open: points of the boundary count as exited.

struct HalfSpace {
    std::vector<double> normal; // unit inward normal
};

struct Wedge2D {
    double beta = 0.0; // opening angle, (0, pi] under convexity
    double base = 0.0; // angle of the lower boundary ray
};

struct Orthant {
    int dim = 0;
};

/// Type-A Weyl chamber {x_1 < x_2 < ... < x_d}.
struct WeylChamberA {
    int dim = 0;
};

struct Polyhedral {
    std::vector<std::vector<double>> normals; // inward unit normals
};

class ConeSpec {
public:
    using Variant = std::variant<HalfSpace, Wedge2D, Orthant, WeylChamberA, Polyhedral>;

    explicit ConeSpec(Variant v);

    int dim() const { return dim_; }
    const Variant& variant() const { return variant_; }

    /// True iff the point lies in the open cone.
    bool contains(const std::vector<double>& x) const;
    bool contains_closed(const std::vector<double>& x) const;

    /// Euclidean distance to the boundary; the point must lie in K.
    double dist_boundary(const std::vector<double>& x) const;

    /// Shrunken-cone membership: x in K and dist(x, dK) >= n^{1/2-eps}.
    bool in_shrunken(const std::vector<double>& x, long long n, double epsilon) const;

    std::string variant_name() const;

private:
    Variant variant_;
    int dim_ = 0;
};

double shrunken_threshold(long long n, double epsilon);

ConeSpec transform_cone(const ConeSpec& cone, const LinearTransform& t);

ConeSpec cone_from_json(const std::string& json_text);
ConeSpec cone_from_file(const std::string& path);
std::string cone_to_json(const ConeSpec& cone);

} // namespace cw

#endif
