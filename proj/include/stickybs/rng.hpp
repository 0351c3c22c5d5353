#pragma once
// Deterministic seeding. Ensembles derive one seed per path from
// (master_seed, path_index), so results do not depend on evaluation order.

#include <cstdint>
#include <random>

namespace stickybs {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(path_index + 0x632be59bd9b4e019ULL));
}

// Private per-path stream of N(0,1) and U(0,1) draws.
class PathRng {
  public:
    explicit PathRng(std::uint64_t seed) : eng_(seed) {}
    double normal() { return normal_(eng_); }
    double uniform() { return uniform_(eng_); }

  private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace stickybs
