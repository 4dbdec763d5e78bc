#pragma once

#include <cstdint>
#include <limits>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace blockggm {

/* Counter-based 64-bit generator: a Weyl sequence passed through the
   SplitMix64 output mixer (Vigna, 2015).  Small state, splittable, and easy
   to reason about for reproducibility.  Variates are drawn through the
   boost::random distributions rather than the std::random ones since the
   C++ standard does not pin down the latter's output, so only the boost
   versions give identical streams across standard library implementations. */
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /* Derives an independent substream keyed by up to two integer tags.
       Used to give every chain, replicate, and sampling purpose its own
       stream from one user-facing seed: the derived state is the mixed
       combination of the parent seed and the tags, so distinct tag tuples
       give unrelated sequences. */
    Rng substream(std::uint64_t tag_a, std::uint64_t tag_b = 0) const {
        std::uint64_t s = mix(state_ + 0x9e3779b97f4a7c15ULL);
        s = mix(s ^ mix(tag_a + 0xbf58476d1ce4e5b9ULL));
        s = mix(s ^ mix(tag_b + 0x94d049bb133111ebULL));
        return Rng(s);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

inline double runif(Rng& rng) {
    return boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/* Uniform integer on {lo, ..., hi} inclusive. */
inline int runif_int(Rng& rng, int lo, int hi) {
    return boost::random::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double rnorm(Rng& rng, double mean = 0.0, double sd = 1.0) {
    return boost::random::normal_distribution<double>(mean, sd)(rng);
}

/* Gamma variate in the shape/rate parameterization used throughout. */
inline double rgamma(Rng& rng, double shape, double rate) {
    return boost::random::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

inline double rbeta(Rng& rng, double a, double b) {
    return boost::random::beta_distribution<double>(a, b)(rng);
}

inline double rexp(Rng& rng, double rate = 1.0) {
    return boost::random::exponential_distribution<double>(rate)(rng);
}

inline bool rbernoulli(Rng& rng, double prob) {
    return boost::random::bernoulli_distribution<double>(prob)(rng);
}

}  // namespace blockggm
