#include "pemi/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "pemi/errors.hpp"
#include "pemi/random.hpp"
#include "pemi/sequence.hpp"

namespace pemi {

Permutation::Permutation(std::vector<std::uint32_t> image, long first_index)
    : image_(std::move(image)), first_(first_index) {
  std::vector<bool> seen(image_.size(), false);
  for (auto s : image_) {
    if (s >= image_.size() || seen[s]) throw DomainError("permutation image is not a bijection");
    seen[s] = true;
  }
}

Permutation Permutation::identity(std::size_t n, long first_index) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  return Permutation(std::move(img), first_index);
}

long Permutation::operator()(long index) const {
  if (index < first_ || index > last_index()) throw DomainError("index outside permutation domain");
  return first_ + static_cast<long>(image_[static_cast<std::size_t>(index - first_)]);
}

Permutation Permutation::inverse() const {
  std::vector<std::uint32_t> inv(image_.size());
  for (std::size_t p = 0; p < image_.size(); ++p) inv[image_[p]] = static_cast<std::uint32_t>(p);
  return Permutation(std::move(inv), first_);
}

bool Permutation::is_identity() const {
  for (std::size_t p = 0; p < image_.size(); ++p)
    if (image_[p] != p) return false;
  return true;
}

void shuffle_identity(std::span<std::uint32_t> out, std::uint64_t stream_seed) {
  std::iota(out.begin(), out.end(), 0u);
  SplitMix64 gen(stream_seed);
  for (std::size_t k = out.size(); k > 1; --k) {
    const auto j = uniform_below(gen, k);
    std::swap(out[k - 1], out[j]);
  }
}

PermutationSample::PermutationSample(std::size_t n, long first_index, std::size_t M, std::uint64_t seed)
    : flat_(n * M), n_(n), count_(M), first_(first_index), seed_(seed) {
  if (n == 0) throw DomainError("permutation range must be non-empty");
  for (std::size_t i = 0; i < M; ++i)
    shuffle_identity({flat_.data() + i * n, n},
                     derive_seed(seed, {n, static_cast<std::uint64_t>(first_index), i}));
}

PermutationSample PermutationSample::from(const std::vector<Permutation>& perms, std::size_t n, long first_index) {
  PermutationSample s;
  s.n_ = n;
  s.first_ = first_index;
  s.count_ = perms.size();
  s.flat_.reserve(n * perms.size());
  for (const auto& p : perms) {
    if (p.size() != n || p.first_index() != first_index) throw DomainError("permutation domain mismatch");
    s.flat_.insert(s.flat_.end(), p.image().begin(), p.image().end());
  }
  return s;
}

Permutation PermutationSample::operator[](std::size_t i) const {
  auto img = image(i);
  return Permutation(std::vector<std::uint32_t>(img.begin(), img.end()), first_);
}

PermutationSample sample_permutations(std::size_t t, std::size_t M, std::uint64_t seed) {
  if (t == 0) throw DomainError("sample_permutations requires t >= 1");
  return PermutationSample(t, 1, M, seed);
}

PermutationSample sample_permutations(const DataSequence& seq, std::size_t M, std::uint64_t seed) {
  return PermutationSample(seq.size(), seq.first_index(), M, seed);
}

}  // namespace pemi
