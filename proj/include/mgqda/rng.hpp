#pragma once

#include <mgqda/linalg.hpp>

#include <cstdint>
#include <random>

namespace mgqda {

using Rng = std::mt19937_64;

/// What a stream is used for; part of the stream key.
enum class StreamPurpose : std::uint64_t
{
    Covariance = 1,  // block-model U and Lambda draws
    Train = 2,
    Test = 3,
    CvFolds = 4,
};

/// Pinned generator description, written next to benchmark output.
inline constexpr const char* kRngDescription =
    "std::mt19937_64 per stream; stream seed = splitmix64 chain over (seed, rep, group, purpose); "
    "boost::random::normal_distribution (ziggurat) and uniform_real_distribution";

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the stream keyed by (seed, rep, group, purpose).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t rep, std::uint64_t group, StreamPurpose purpose);

Rng make_stream(std::uint64_t seed, std::uint64_t rep, std::uint64_t group, StreamPurpose purpose);

double standard_normal(Rng& rng);
double uniform_real(Rng& rng, double lo, double hi);
/// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

Matrix standard_normal_matrix(Rng& rng, Index rows, Index cols);

} // namespace mgqda
