#include <mgqda/rng.hpp>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace mgqda {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t rep, std::uint64_t group, StreamPurpose purpose)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ rep);
    h = splitmix64(h ^ group);
    return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

Rng make_stream(std::uint64_t seed, std::uint64_t rep, std::uint64_t group, StreamPurpose purpose)
{
    return Rng(stream_seed(seed, rep, group, purpose));
}

double standard_normal(Rng& rng)
{
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

double uniform_real(Rng& rng, double lo, double hi)
{
    boost::random::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    boost::random::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(rng);
}

Matrix standard_normal_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix out(rows, cols);
    // row-major fill so the draw order does not depend on storage order
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) out(i, j) = standard_normal(rng);
    }
    return out;
}

} // namespace mgqda
