#include "kirchhoff/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <random>

namespace kirchhoff {

namespace {

constexpr std::uint64_t kChunk = 1 << 16;

std::uint64_t chunk_hits(const Potential& potential, const Point& center, double radius,
                         double level, std::uint64_t begin, std::uint64_t end, std::uint64_t seed,
                         std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uint64_t hits = 0;
  for (std::uint64_t k = begin; k < end; ++k) {
    double x = 0.0, y = 0.0, z = 0.0;
    do {
      x = uni(rng);
      y = uni(rng);
      z = uni(rng);
    } while (x * x + y * y + z * z > 1.0);
    const Point p{center[0] + radius * x, center[1] + radius * y, center[2] + radius * z};
    if (potential.at(p) <= level) ++hits;
  }
  return hits;
}

}  // namespace

int thread_count() {
  if (const char* env = std::getenv("THREADS")) {
    int n = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), n);
    if (ec == std::errc() && *ptr == '\0' && n > 0) return n;
  }
  return std::max(1, omp_get_max_threads());
}

std::vector<double> map_indexed(std::size_t count, const std::function<double(std::size_t)>& fn,
                                Exec exec) {
  std::vector<double> out(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(i);
  return out;
}

std::vector<double> energies(const VariationalProblem& problem, std::span<const Eigen::VectorXd> points,
                             Exec exec) {
  return map_indexed(
      points.size(), [&](std::size_t i) { return problem.energy(points[i]); }, exec);
}

std::uint64_t count_sublevel(const Potential& potential, const Point& center, double radius,
                             double level, std::uint64_t samples, std::uint64_t seed, Exec exec) {
  const auto chunks = static_cast<std::ptrdiff_t>((samples + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  auto run = [&](std::ptrdiff_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(samples, begin + kChunk);
    hits[c] = chunk_hits(potential, center, radius, level, begin, end, seed, c);
  };
  if (exec == Exec::serial) {
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run(c);
  } else {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (std::ptrdiff_t c = 0; c < chunks; ++c) run(c);
  }
  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;
  return total;
}

}  // namespace kirchhoff
