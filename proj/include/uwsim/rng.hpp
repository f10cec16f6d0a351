#pragma once

#include <cstdint>
#include <random>

namespace uwsim {

enum class Stream : std::uint64_t { placement = 1, protocol = 2, traffic = 3, mobility = 4, selection = 5 };

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the (owner, stream) pair under `master_seed`. Owners are node
/// indices; whole-network draws use owner 0xffffffff.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t owner, Stream stream) noexcept {
    return splitmix64(splitmix64(splitmix64(master_seed) ^ owner) ^ static_cast<std::uint64_t>(stream));
}

inline constexpr std::uint64_t kNetworkOwner = 0xffffffffULL;

inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t owner, Stream stream) {
    return std::mt19937_64(stream_seed(master_seed, owner, stream));
}

}  // namespace uwsim
