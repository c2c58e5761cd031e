#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sausage/geometry.hpp"
#include "sausage/io.hpp"
#include "sausage/params.hpp"
#include "sausage/process.hpp"
#include "sausage/rng.hpp"

namespace sausage {

inline constexpr std::uint64_t kDefaultSeed = 1862704373ull;

struct ExperimentConfig {
  ProcessParams params;
  std::vector<double> t_checkpoints;
  double mesh = 0.01;
  int replicas = 100;
  VolumeOptions volume;
  double tail_factor = 0.0;  // > 0: also measure [t, (1+f) t] windows
  std::uint64_t master_seed = kDefaultSeed;
  int workers = 0;  // 0 = hardware concurrency
  double quadrature_tolerance = 1e-8;

  void validate() const;
  double horizon() const;  // largest simulated time over all windows
};

struct ReplicaRecord {
  int replica_id = 0;
  bool failed = false;
  std::string error;
  std::vector<VolumeEstimate> volumes;            // windows [0, t_k]
  std::vector<VolumeEstimate> tail_volumes;       // windows [t_k, (1+f) t_k]
  std::vector<VolumeEstimate> tail_intersections; // overlap of those two
};

// Runs tasks 0..n-1 on `workers` threads (0 = hardware concurrency).  Tasks
// must only write state owned by their own index; the first exception wins
// and is rethrown after the pool drains.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

// One path per replica (stream id = replica id), volumes at every checkpoint,
// tail windows when tail_factor > 0.  Per-replica failures are recorded, not
// thrown.  Results are identical for any worker count.
std::vector<ReplicaRecord> run_volume_replicas(const ExperimentConfig& cfg);

// Growth of mean volume against the Green-normalized capacity of the ball.
ExperimentReport lln_capacity_check(const std::vector<ReplicaRecord>& records,
                                    const ExperimentConfig& cfg);

struct SigmaEstimate {
  double sigma2 = 0.0;
  double sigma = 0.0;
  double half_width = 0.0;  // ~2-sigma interval radius on sigma2
  double envelope = 0.0;    // max_k Var[V_t] / (t h(t))
};

// Var[V_t] ~ sigma^2 t: least squares through the origin across checkpoints.
SigmaEstimate estimate_sigma(const std::vector<ReplicaRecord>& records,
                             const ExperimentConfig& cfg);

// Standardized volumes at the last checkpoint against N(0,1); requires the
// Gaussian regime d/alpha > 3/2.
ExperimentReport clt_experiment(const std::vector<ReplicaRecord>& records,
                                const SigmaEstimate& sigma,
                                const ExperimentConfig& cfg);

// Covariance of the rescaled volume process across checkpoints against
// min(s,t) (Brownian limit), all times relative to the last checkpoint.
ExperimentReport fclt_covariance_experiment(
    const std::vector<ReplicaRecord>& records, const SigmaEstimate& sigma,
    const ExperimentConfig& cfg, double cov_tolerance = 0.12);

// Mean overlap between [0,t] and [t,(1+f)t] sausages against the variance
// scale h(t): bounded multiple, slope in the polynomial regime.
ExperimentReport gap_bound_check(const std::vector<ReplicaRecord>& records,
                                 const ExperimentConfig& cfg);

// k-th moment of the overlap volume of two independent sausages from a common
// origin against the 2^{k-1} (k!)^2 m_1^k bound.
ExperimentReport intersection_moment_experiment(const ExperimentConfig& cfg,
                                                int k);

// Fourth central moment of V_t against t^2 across checkpoints.
ExperimentReport fourth_moment_experiment(
    const std::vector<ReplicaRecord>& records, const ExperimentConfig& cfg);

// Hitting time of B(0,2) from x versus 2^alpha times the hitting time of
// B(0,1) from x/2; two-sample KS on the monitoring grid, censored at the
// horizon.  Heavy censoring (> 50% in either arm) marks the report
// inconclusive.
ExperimentReport tau_scaling_experiment(const ExperimentConfig& cfg,
                                        double start_distance);

// 0, then blocks k = 1..k_max of n = 2^k + floor(j 2^{k/2} / k); consecutive
// gaps within a block are at most 2^{k/2}/k + 1.
std::vector<std::uint64_t> lil_checkpoint_sequence(int k_max);

// Envelope statistics for the iterated-logarithm laws, given per-replica
// volumes along `checkpoints` (only entries with t >= exp(e) are scored).
ExperimentReport lil_envelope_statistics(
    const std::vector<std::uint64_t>& checkpoints,
    const std::vector<std::vector<double>>& volumes, double growth_rate,
    double sigma);

// Simulates d/alpha > 9/5 paths along the checkpoint sequence and scores the
// envelope statistics.
ExperimentReport lil_paths_experiment(const ExperimentConfig& cfg, double sigma,
                                      int k_max);

// Per-path decomposition along the checkpoint sequence: window volumes minus
// overlaps telescope exactly to the total volume (d = 1).
ExperimentReport intersection_process_stats(const ExperimentConfig& cfg,
                                            int k_max);

}  // namespace sausage
