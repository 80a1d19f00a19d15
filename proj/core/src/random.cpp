#include "posauth/random.hpp"

#include "posauth/error.hpp"

namespace posauth {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::insufficient_coverage: return "insufficient_coverage";
    case ErrorKind::degenerate_geometry: return "degenerate_geometry";
    case ErrorKind::non_convergence: return "non_convergence";
    case ErrorKind::undefined_metric: return "undefined_metric";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t key : path) {
    h = mix64(h ^ mix64(key + 0x632be59bd9b4e019ULL));
  }
  return h;
}

RandomStream make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return RandomStream(derive_seed(master, path));
}

double standard_normal(RandomStream& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform(RandomStream& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

}  // namespace posauth
