#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace wsnd {

// Deterministic, splittable random stream. A (master_seed, stream_id) pair
// fixes the full sample sequence; distinct stream ids give independent
// streams. All variate generation is implemented on top of raw engine
// output so sequences are bit-identical across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        engine_(mix(master_seed, stream_id)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derived stream for a sub-task (trial index, worker chunk, ...).
  RngStream substream(std::uint64_t id) const {
    return RngStream(mix(master_seed_, stream_id_), id);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1), safe as a log argument.
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0,1): real and imaginary parts independent N(0, 1/2).
  std::complex<double> complex_normal() {
    const double s = 0.70710678118654752440084436210485;
    return {s * normal(), s * normal()};
  }

  double exponential(double mean) { return -mean * std::log(uniform_pos()); }

  // Gamma(shape, scale 1), Marsaglia-Tsang.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  double student_t(double nu) {
    return normal() / std::sqrt(chi_square(nu) / nu);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) + 0x9E3779B97F4A7C15ULL * (stream + 1));
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wsnd
