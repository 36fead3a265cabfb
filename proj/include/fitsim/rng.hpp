#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fitsim {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used both as a mixer and to derive child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a list of stream indices into a master seed so that every
// (cell, replicate) combination gets an independent, schedule-independent
// random stream.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t ix : indices) {
        h = splitmix64(h ^ (ix + 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
    return Rng(derive_seed(master, indices));
}

}  // namespace fitsim
