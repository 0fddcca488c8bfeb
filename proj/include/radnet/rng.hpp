#pragma once

// Seeded, platform-independent randomness.  All randomized utilities in the
// toolkit draw from this generator so that identical seeds give identical
// outputs at identical precision.

#include "radnet/real.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace radnet {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derive an independent stream, e.g. per trial or per worker.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        Rng base(seed);
        base.next();
        return Rng(base.next() ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Real uniform_real(double lo, double hi, unsigned prec) { return Real(uniform(lo, hi), prec); }

    double gaussian() {
        // Box-Muller; consumes two uniforms per pair, caches the second.
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(6.283185307179586 * u2);
        have_spare_ = true;
        return r * std::cos(6.283185307179586 * u2);
    }

    std::vector<double> unit_vector(int d) {
        std::vector<double> v(d);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                v[i] = gaussian();
                norm2 += v[i] * v[i];
            }
        } while (norm2 == 0.0);
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

    // Uniform on the d-ball: random direction times U^{1/d} radius.
    std::vector<double> ball_point(int d) {
        std::vector<double> v = unit_vector(d);
        double rho = std::pow(uniform(), 1.0 / d);
        for (auto& x : v) x *= rho;
        return v;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace radnet
