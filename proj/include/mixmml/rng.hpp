#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mixmml {

// Stateless seed mixing for deriving independent streams from a master
// seed. Standard splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    return mix64(mix64(mix64(master ^ mix64(a)) ^ mix64(b)) ^ mix64(c));
}

// Thin RNG wrapper. Sampling routines are written out explicitly so that
// results depend only on the mt19937_64 stream, not on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    double uniform01() {
        // 53-bit mantissa in [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Index draw from an unnormalized non-negative weight vector.
    int categorical(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            u -= weights[k];
            if (u < 0.0) return static_cast<int>(k);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // Flat Dirichlet(1,...,1) draw via normalized exponentials.
    void dirichlet_flat(double* out, int n) {
        double sum = 0.0;
        for (int c = 0; c < n; ++c) {
            double u = uniform01();
            if (u <= 0.0) u = 0x1.0p-53;
            out[c] = -std::log(u);
            sum += out[c];
        }
        for (int c = 0; c < n; ++c) out[c] /= sum;
    }

    // Multinomial counts from `trials` independent category draws.
    void multinomial(int trials, const double* probs, int n_cats, int* out) {
        for (int c = 0; c < n_cats; ++c) out[c] = 0;
        for (int t = 0; t < trials; ++t) {
            double u = uniform01();
            int c = n_cats - 1;
            for (int j = 0; j + 1 < n_cats; ++j) {
                u -= probs[j];
                if (u < 0.0) {
                    c = j;
                    break;
                }
            }
            ++out[c];
        }
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace mixmml
