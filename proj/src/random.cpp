#include "boardgen/random.hpp"

#include <string>

namespace boardgen {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : text) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t deriveSeed(std::uint64_t root, std::string_view label) {
  return splitmix64(root ^ fnv1a(label));
}

std::uint64_t deriveSeed(std::uint64_t root, std::string_view label, std::uint64_t index) {
  std::string full{label};
  full += '/';
  full += std::to_string(index);
  return deriveSeed(root, full);
}

}  // namespace boardgen
