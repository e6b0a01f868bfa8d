#include "itl/random.hpp"

#include <cmath>
#include <unordered_set>

namespace itl {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {
std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    return splitmix64(splitmix64(master) ^ fnv1a64(label));
}

double RandomEngine::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t RandomEngine::uniform_index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::uint64_t(-span) % span;  // 2^64 mod n
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r < limit);
    return static_cast<std::size_t>(r % span);
}

std::vector<std::size_t> RandomEngine::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> out;
    out.reserve(k);
    std::unordered_set<std::size_t> seen;
    while (out.size() < k) {
        std::size_t idx = uniform_index(n);
        if (seen.insert(idx).second) out.push_back(idx);
    }
    return out;
}

}  // namespace itl
