#pragma once

#include <span>
#include <vector>

#include "memlme/types.hpp"

namespace memlme {

// Counter-clockwise convex hull of a planar point set (Andrew's monotone
// chain). Collinear boundary points are dropped. Returns indices into the
// input.
std::vector<int> convex_hull(std::span<const Vec2> points);

// Signed distance from x to the boundary of the convex polygon `hull`
// (indices into points, counter-clockwise). Positive inside, negative
// outside. The polygon must have at least three vertices.
double hull_signed_distance(std::span<const Vec2> points, std::span<const int> hull, const Vec2& x);

// Largest pairwise distance; computed over the hull when one is available.
double diameter(std::span<const Vec2> points);

}  // namespace memlme
