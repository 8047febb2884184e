#pragma once

// Synthetic benchmark geometry.

#include <cstdint>
#include <vector>

#include "memlme/mesh.hpp"

namespace memlme {

// Class-I geodesic sphere: each icosahedron face split into f^2 triangles,
// projected to radius r. N = 10 f^2 + 2.
TriMesh generate_geodesic_sphere(int frequency, double radius);

// Open cylinder of radius rho around the z axis with `columns` vertex
// columns (even) and `rows` vertices per column. Odd columns are shifted by
// half an axial step, and the axial step is chosen so that the triangles
// are isosceles with the circumferential chord as height.
TriMesh generate_cylinder(int columns, int rows, double radius);

// Flat n x n grid on [0, size]^2 in the z = 0 plane, split along one diagonal.
TriMesh generate_planar_grid(int n, double size);

struct PointCloud {
  std::vector<Vec3> points;
};

// z = sin(x1^2 + x2) on a square grid [lo, hi]^2 with round((hi-lo)/h) + 1
// nodes per side (the spacing is adjusted to fit the domain exactly).
PointCloud generate_sinusoid_grid(double lo, double hi, double h);
int sinusoid_grid_side(double lo, double hi, double h);

// N uniformly random nodes on [0, pi]^2 with z = sin(x1^2 + x2).
PointCloud generate_random_sinusoid(int n, std::uint64_t seed);

// Frames of a geodesic sphere whose vertices carry independent radial
// Gaussian noise of standard deviation sigma. Times are 1, 2, ..., frames.
Trajectory generate_noisy_sphere_trajectory(int frequency, double radius, double sigma, int frames,
                                            std::uint64_t seed);

// Portable uniform deviate in [0, 1) and standard normal deviate.
double uniform01(std::uint64_t& state);
double normal01(std::uint64_t& state);

}  // namespace memlme
