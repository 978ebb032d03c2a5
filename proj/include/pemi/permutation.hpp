#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pemi {

class DataSequence;

/// A bijection on the index range {first, ..., first + n - 1}. Stored in slot
/// form: image[p] is the 0-based slot whose point lands at position p, i.e.
/// pi(first + p) = first + image[p].
class Permutation {
 public:
  /// Throws DomainError unless `image` is a bijection on {0..n-1}.
  explicit Permutation(std::vector<std::uint32_t> image, long first_index = 1);

  static Permutation identity(std::size_t n, long first_index = 1);

  std::size_t size() const { return image_.size(); }
  long first_index() const { return first_; }
  long last_index() const { return first_ + static_cast<long>(image_.size()) - 1; }

  /// pi(index) in time-index form.
  long operator()(long index) const;
  std::span<const std::uint32_t> image() const { return image_; }
  Permutation inverse() const;
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> image_;
  long first_;
};

/// M permutations of a common index range, stored contiguously. Permutation i
/// is generated from its own stream derive_seed(seed, {n, first, i}), so any
/// member can be regenerated without drawing its predecessors.
class PermutationSample {
 public:
  PermutationSample(std::size_t n, long first_index, std::size_t M, std::uint64_t seed);

  /// Wraps explicit permutations (used by full enumeration and tests).
  static PermutationSample from(const std::vector<Permutation>& perms, std::size_t n, long first_index = 1);

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t domain_size() const { return n_; }
  long first_index() const { return first_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const std::uint32_t> image(std::size_t i) const { return {flat_.data() + i * n_, n_}; }
  Permutation operator[](std::size_t i) const;

 private:
  PermutationSample() = default;

  std::vector<std::uint32_t> flat_;
  std::size_t n_ = 0;
  std::size_t count_ = 0;
  long first_ = 1;
  std::uint64_t seed_ = 0;
};

/// M i.i.d. uniform permutations of {1..t}. Throws DomainError when t = 0.
PermutationSample sample_permutations(std::size_t t, std::size_t M, std::uint64_t seed);

/// M i.i.d. uniform permutations of the sequence's full range {-n_off+1..t}.
PermutationSample sample_permutations(const DataSequence& seq, std::size_t M, std::uint64_t seed);

/// Writes a uniform permutation of {0..n-1} into `out` using one stream.
void shuffle_identity(std::span<std::uint32_t> out, std::uint64_t stream_seed);

}  // namespace pemi
