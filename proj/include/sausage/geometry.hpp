#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sausage/process.hpp"
#include "sausage/rng.hpp"

namespace sausage {

// Union of closed balls of common radius around the skeleton points that fall
// in the time window [window_s, window_t].
struct SausageSkeleton {
  int d = 1;
  double radius = 1.0;
  double window_s = 0.0;
  double window_t = 0.0;
  std::vector<double> centers;  // n * d, row-major

  std::size_t count() const {
    return centers.size() / static_cast<std::size_t>(d);
  }
  const double* center(std::size_t i) const {
    return centers.data() + i * static_cast<std::size_t>(d);
  }
};

SausageSkeleton make_sausage(const PathSkeleton& path, double radius);

// Skeleton points with s <= time <= t, endpoints inclusive up to a relative
// grid tolerance; a window containing no skeleton point is rejected.
SausageSkeleton slice(const PathSkeleton& path, double s, double t, double radius);

enum class VolumeMethod { exact1d, grid, hitmiss };
std::string volume_method_name(VolumeMethod m);
VolumeMethod parse_volume_method(const std::string& name);

struct VolumeEstimate {
  double value = 0.0;
  double stat_error = 0.0;  // one-sigma Monte Carlo error; 0 for deterministic
  VolumeMethod method = VolumeMethod::exact1d;
  double resolution = 0.0;      // voxel edge for the grid method
  std::uint64_t samples = 0;    // voxels visited or Monte Carlo draws
};

// Fixed-radius neighbor lookup over the skeleton centers, hash grid with cell
// size equal to the radius.  Hash collisions only enlarge candidate lists;
// membership always rechecks exact distances (closed balls).
class SpatialIndex {
 public:
  explicit SpatialIndex(const SausageSkeleton& skeleton);

  // Is p inside the union of balls?  `hint` caches the last hit center index
  // across calls for coherent query sequences; pass nullptr to skip.
  bool contains(const double* p, std::uint32_t* hint = nullptr) const;

  std::size_t point_count() const { return count_; }

 private:
  std::uint64_t cell_key(const double* p) const;

  int d_;
  double inv_cell_;
  double radius2_;
  std::size_t count_;
  std::vector<double> centers_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

// d = 1 closed form: sorted centers, merged intervals.  Exact, no estimator
// error.
VolumeEstimate volume_exact_1d(const SausageSkeleton& skeleton);

// Counts voxel centers inside the union; the voxel lattice is anchored at the
// origin, so refining t -> t' >= t can only add counted voxels (monotone in
// the window).  Requires edge <= radius/2; the voxel budget is capped.
VolumeEstimate volume_grid(const SausageSkeleton& skeleton, double edge);

// Uniform sampling over the bounding box of the union.  Draws are sharded
// into fixed-size blocks with one substream per block, so the estimate
// depends only on (stream identity, n), not on worker count or call order.
VolumeEstimate volume_hit_or_miss(const SausageSkeleton& skeleton,
                                  std::uint64_t n, const RandomStream& stream);

struct VolumeOptions {
  VolumeMethod method = VolumeMethod::exact1d;
  double grid_edge = 0.05;
  std::uint64_t mc_samples = 200000;
};

// Dispatch on method; hitmiss requires a stream.
VolumeEstimate sausage_volume(const SausageSkeleton& skeleton,
                              const VolumeOptions& opts,
                              const RandomStream* stream = nullptr);

// Volume of the intersection of two same-radius sausages.  Disjoint bounding
// boxes short-circuit to exactly zero.
VolumeEstimate intersection_volume(const SausageSkeleton& a,
                                   const SausageSkeleton& b,
                                   const VolumeOptions& opts,
                                   const RandomStream* stream = nullptr);

}  // namespace sausage
