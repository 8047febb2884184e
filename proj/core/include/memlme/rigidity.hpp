#pragma once

// Dihedral bending energy, its continuum counterpart and the
// zero-temperature bending rigidity estimate.

#include <iosfwd>
#include <string_view>
#include <vector>

#include "memlme/mesh.hpp"
#include "memlme/pipeline.hpp"

namespace memlme {

struct DihedralEnergy {
  double cosine_form = 0.0;  // D sum (1 - n.n')
  double norm_form = 0.0;    // (D/2) sum |n - n'|^2
  double value() const noexcept { return cosine_form; }
};

// Sum over interior edges. Throws Error{kInvalidArgument} if the two forms
// disagree by more than 1e-12 relative.
DihedralEnergy dihedral_energy(const TriMesh& mesh, double D);

// Per-vertex split of the dihedral energy: half of every interior edge's
// term goes to each endpoint. Sums to dihedral_energy().value().
std::vector<double> dihedral_energy_shares(const TriMesh& mesh, double D);

enum class BendingMode { kClosedGenus0, kGeneral };

std::string_view to_string(BendingMode mode) noexcept;
BendingMode parse_bending_mode(std::string_view name);

struct BendingEnergy {
  double value = 0.0;
  int skipped = 0;  // failed nodes left out of the sum
};

// Helfrich-type energy at unit rigidity over the field's nodes.
//   closed-genus0: (1/2) [sum (2H)^2 A - 8 pi], field must cover the mesh
//   general:       (1/2) sum [(2H)^2 - 2K] A
// Throws Error{kModeMismatch} when closed-genus0 is used on an open or
// non-spherical mesh, Error{kMismatchedNodes} when coverage is incomplete.
BendingEnergy continuum_bending_energy(const CurvatureField& field, const TriMesh& mesh, BendingMode mode);

struct RigidityRecord {
  double t = 0.0;
  double E_dihedral = 0.0;
  double E_bend_unit = 0.0;
  double instantaneous_ratio = 0.0;
  double running_kappa0 = 0.0;
  bool valid = false;
  int failed_nodes = 0;
};

// For every frame time: cumulative-mean configuration, curvature field,
// energy ratio and running mean of the valid ratios. When cfg selects a
// subset of nodes the dihedral energy is restricted to the same nodes
// through dihedral_energy_shares(). Throws Error{kTooManyFailures} if no
// frame is valid.
std::vector<RigidityRecord> kappa0_estimate(const Trajectory& traj, double D, const PipelineConfig& cfg,
                                            BendingMode mode);

// t, E_dihedral, E_bend_unit, instantaneous_ratio, running_kappa0, valid
void write_rigidity_csv(const std::vector<RigidityRecord>& records, std::ostream& out);

}  // namespace memlme
