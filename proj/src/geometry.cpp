#include "grushin/geometry.hpp"

#include <json.hpp>

#include <cmath>

#include "grushin/errors.hpp"
#include "grushin/parallel.hpp"

namespace grushin {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double diff_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

double grushin_distance(const MetricPoint& x, const MetricPoint& y) {
  if (x.x_prime.size() != y.x_prime.size() || x.x_second.size() != y.x_second.size())
    throw ContractError("grushin_distance: dimension mismatch");
  double dp = diff_norm(x.x_prime, y.x_prime);
  double dz = diff_norm(x.x_second, y.x_second);
  double sp = norm2(x.x_prime) + norm2(y.x_prime);
  double root = std::sqrt(dz);
  if (dz == 0.0) return dp;
  return dp + (root <= sp ? dz / sp : root);
}

double ball_volume_model(const MetricPoint& x, double r) {
  if (!(r > 0.0)) throw DomainError("ball_volume_model: r must be positive");
  int d1 = int(x.x_prime.size()), d2 = int(x.x_second.size());
  return std::pow(r, d1 + d2) * std::pow(std::max(r, norm2(x.x_prime)), d2);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  // splitmix64 step
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return double(z >> 11) * 0x1.0p-53;
}

VolumeEstimate mc_ball_volume(const MetricPoint& x, double r, std::uint64_t samples,
                              std::uint64_t seed) {
  if (samples == 0) throw ContractError("mc_ball_volume: sample budget is zero");
  if (!(r > 0.0)) throw DomainError("mc_ball_volume: r must be positive");
  const std::size_t d1 = x.x_prime.size(), d2 = x.x_second.size();
  // any z in the ball has |z' - x'| < r and |z'' - x''| < max(r^2, r (2|x'| + r))
  const double hz = std::max(r * r, r * (2 * norm2(x.x_prime) + r));
  const std::uint64_t shard = 1 << 16;
  const std::uint64_t nshards = (samples + shard - 1) / shard;
  std::vector<std::uint64_t> hits(nshards, 0);
  parallel_for(nshards, [&](std::size_t s) {
    std::uint64_t state = split_seed(seed, s);
    std::uint64_t n = std::min<std::uint64_t>(shard, samples - s * shard);
    MetricPoint z{std::vector<double>(d1), std::vector<double>(d2)};
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d1; ++a) z.x_prime[a] = x.x_prime[a] + r * (2 * uniform01(state) - 1);
      for (std::size_t a = 0; a < d2; ++a) z.x_second[a] = x.x_second[a] + hz * (2 * uniform01(state) - 1);
      if (grushin_distance(z, x) < r) ++h;
    }
    hits[s] = h;
  });
  VolumeEstimate v;
  v.samples = samples;
  for (auto h : hits) v.hits += h;
  double box = std::pow(2 * r, double(d1)) * std::pow(2 * hz, double(d2));
  double p = double(v.hits) / double(samples);
  v.volume = box * p;
  v.std_error = box * std::sqrt(std::max(p * (1 - p), 0.0) / double(samples));
  return v;
}

double doubling_ratio(const MetricPoint& x, double r, double lambda, std::uint64_t samples,
                      std::uint64_t seed) {
  if (!(lambda >= 1.0)) throw DomainError("doubling_ratio: lambda must be >= 1");
  auto big = mc_ball_volume(x, lambda * r, samples, split_seed(seed, 1));
  auto small = mc_ball_volume(x, r, samples, split_seed(seed, 2));
  if (small.hits == 0) throw DegenerateInputError("doubling_ratio: empty small ball sample");
  return big.volume / small.volume;
}

NetResult build_net(const GrushinGrid& domain, double r) {
  domain.validate();
  if (!(r > 0.0)) throw DomainError("build_net: r must be positive");
  const std::size_t total = domain.size();
  if (total == 0) throw ContractError("build_net: empty domain");
  std::vector<MetricPoint> pts(total);
  for (std::size_t ip = 0; ip < domain.prime_size(); ++ip)
    for (std::size_t is = 0; is < domain.second_size(); ++is)
      pts[ip * domain.second_size() + is] = domain.point(ip, is);
  NetResult net;
  net.r = r;
  const double sep = r / 10.0;
  std::vector<std::size_t> center_idx;
  for (std::size_t i = 0; i < total; ++i) {
    bool far = true;
    for (std::size_t c : center_idx)
      if (grushin_distance(pts[i], pts[c]) <= sep) {
        far = false;
        break;
      }
    if (far) center_idx.push_back(i);
  }
  for (std::size_t c : center_idx) net.centers.push_back(pts[c]);
  // cell i: closed ball around center i minus the earlier cells
  net.center_of.assign(total, 0);
  net.cell_sizes.assign(center_idx.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    bool found = false;
    for (std::size_t c = 0; c < center_idx.size(); ++c)
      if (grushin_distance(pts[i], pts[center_idx[c]]) <= sep) {
        net.center_of[i] = c;
        ++net.cell_sizes[c];
        found = true;
        break;
      }
    if (!found) throw std::logic_error("build_net: point not covered");
  }
  for (std::size_t a = 0; a < center_idx.size(); ++a) {
    int count = 0;
    for (std::size_t b = 0; b < center_idx.size(); ++b)
      if (grushin_distance(net.centers[a], net.centers[b]) <= 2 * r) ++count;
    net.overlap_K = std::max(net.overlap_K, count);
  }
  return net;
}

std::string NetResult::to_json() const {
  nlohmann::json j;
  j["r"] = r;
  j["overlap_K"] = overlap_K;
  j["cell_sizes"] = cell_sizes;
  auto arr = nlohmann::json::array();
  for (const auto& c : centers) arr.push_back({{"x_prime", c.x_prime}, {"x_second", c.x_second}});
  j["centers"] = arr;
  return j.dump();
}

Field ball_projection(const Field& f, const MetricPoint& y, double r) {
  if (!(r > 0.0)) throw DomainError("ball_projection: r must be positive");
  Field out = f;
  const GrushinGrid& g = f.grid;
  for (std::size_t ip = 0; ip < g.prime_size(); ++ip)
    for (std::size_t is = 0; is < g.second_size(); ++is)
      if (!(grushin_distance(g.point(ip, is), y) < r)) out.at(ip, is) = 0.0;
  return out;
}

QuasiTriangleReport quasi_triangle_constant(const Dims& dims, std::uint64_t triples,
                                            std::uint64_t seed) {
  dims.validate();
  const std::uint64_t shard = 4096;
  const std::uint64_t nshards = (triples + shard - 1) / shard;
  std::vector<double> best(nshards, 0.0);
  parallel_for(nshards, [&](std::size_t s) {
    std::uint64_t state = split_seed(seed, s);
    std::uint64_t n = std::min<std::uint64_t>(shard, triples - s * shard);
    // points at log-uniform scales in a random direction, so the degenerate
    // region near x' = 0 and both branches are exercised
    auto draw = [&](double scale) {
      MetricPoint p{std::vector<double>(dims.d1), std::vector<double>(dims.d2)};
      double sp = scale * std::pow(10.0, 3 * uniform01(state) - 2);
      double sz = scale * scale * std::pow(10.0, 4 * uniform01(state) - 3);
      for (auto& v : p.x_prime) v = sp * (2 * uniform01(state) - 1);
      for (auto& v : p.x_second) v = sz * (2 * uniform01(state) - 1);
      return p;
    };
    double m = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      double scale = std::pow(10.0, 2 * uniform01(state) - 1);
      auto x = draw(scale), y = draw(scale), z = draw(scale);
      double lhs = grushin_distance(x, z);
      double rhs = grushin_distance(x, y) + grushin_distance(y, z);
      if (rhs > 0) m = std::max(m, lhs / rhs);
    }
    best[s] = m;
  });
  QuasiTriangleReport rep;
  rep.triples = triples;
  for (double b : best) rep.constant = std::max(rep.constant, b);
  return rep;
}

}  // namespace grushin
