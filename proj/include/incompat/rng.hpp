#ifndef INCOMPAT_RNG_HPP
#define INCOMPAT_RNG_HPP

#include <cstdint>
#include <random>

namespace incompat {

/// Seeded generator with independent streams. Identical (seed, stream_id)
/// pairs reproduce identical samples on one platform; a single stream must
/// not be shared across threads.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Fresh generator for a derived stream; used to hand out per-trial
  /// streams from one experiment seed.
  SeededRng substream(std::uint64_t offset) const {
    return SeededRng(seed_, stream_id_ ^ (0x9e3779b97f4a7c15ULL * (offset + 1)));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace incompat

#endif
