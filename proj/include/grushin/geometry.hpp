#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grushin/engine.hpp"
#include "grushin/point.hpp"

namespace grushin {

// |x' - y'| + (|dz| / (|x'| + |y'|) if |dz|^{1/2} <= |x'| + |y'|, else |dz|^{1/2}).
double grushin_distance(const MetricPoint& x, const MetricPoint& y);

// r^{d1+d2} max(r, |x'|)^{d2}.
double ball_volume_model(const MetricPoint& x, double r);

struct VolumeEstimate {
  double volume = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
};

// Rejection sampling in the bounding box of the ball. Samples are drawn in
// fixed-size shards whose seeds derive from `seed`, so the result does not
// depend on the thread count.
VolumeEstimate mc_ball_volume(const MetricPoint& x, double r, std::uint64_t samples,
                              std::uint64_t seed);

double doubling_ratio(const MetricPoint& x, double r, double lambda, std::uint64_t samples,
                      std::uint64_t seed);

struct NetResult {
  std::vector<MetricPoint> centers;
  std::vector<std::size_t> center_of;   // per domain point (flat grid index)
  std::vector<std::size_t> cell_sizes;  // per center
  double r = 0.0;
  int overlap_K = 0;
  std::string to_json() const;
};

// Greedy r/10-separated net over the grid points in scan order.
NetResult build_net(const GrushinGrid& domain, double r);

Field ball_projection(const Field& f, const MetricPoint& y, double r);

struct QuasiTriangleReport {
  double constant = 0.0;
  std::uint64_t triples = 0;
};
QuasiTriangleReport quasi_triangle_constant(const Dims& dims, std::uint64_t triples,
                                            std::uint64_t seed);

// Deterministic 64-bit mixing for per-shard seeds.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);
double uniform01(std::uint64_t& state);

}  // namespace grushin
