#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kirchhoff/model.hpp"
#include "kirchhoff/variational.hpp"

namespace kirchhoff {

/// Data-parallel loops come in two flavours: a plain serial reference and an
/// OpenMP version. Both write results by index and reduce in index order, so
/// they return bit-identical output for any thread count.
enum class Exec { serial, parallel };

/// Thread cap: the THREADS environment variable when set to a positive
/// integer, otherwise every available core.
int thread_count();

/// fn(i) for i in [0, count).
std::vector<double> map_indexed(std::size_t count, const std::function<double(std::size_t)>& fn,
                                Exec exec = Exec::parallel);

/// Energy of every point.
std::vector<double> energies(const VariationalProblem& problem, std::span<const Eigen::VectorXd> points,
                             Exec exec = Exec::parallel);

/// Number of the first `samples` points of a seeded uniform stream in the
/// ball |x - center| <= radius where V(x) <= level. The stream depends only
/// on (seed, samples), so calls with different centres use common random
/// numbers.
std::uint64_t count_sublevel(const Potential& potential, const Point& center, double radius,
                             double level, std::uint64_t samples, std::uint64_t seed,
                             Exec exec = Exec::parallel);

}  // namespace kirchhoff
