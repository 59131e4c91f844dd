#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "henlab/rng.hpp"

namespace henlab {

// Generators of F2 = <h1, h2> with their inverses, in a pinned order.
// Tokens: a = H1, b = H2, A = H1Inv, B = H2Inv; the empty word prints as "e".
enum class Generator : std::uint8_t { H1 = 0, H2 = 1, H1Inv = 2, H2Inv = 3 };

constexpr Generator inverse(Generator g) {
  return static_cast<Generator>((static_cast<unsigned>(g) + 2u) & 3u);
}

char token(Generator g);
Generator generator_from_token(char c);

// Freely reduced word, letters in composition order: for S = w_k ... w_1 the
// outermost factor w_k sits at index 0 and w_1 (applied first) at the back.
// Free reduction cancels the same adjacent pairs in a sequence and in its
// mirror image, so reduced lengths agree for both reading orders.
struct Word {
  std::vector<Generator> letters;
  bool operator==(const Word&) const = default;
};

bool is_reduced(std::span<const Generator> letters);
Word reduce(std::span<const Generator> letters);
Word concat(const Word& u, const Word& v);
Word inverse(const Word& w);
std::string to_string(const Word& w);

// Parses tokens, "e" (alone) for the empty word; reduces permissively.
Word word_from_string(std::string_view s);

// 1 for n = 0, else 4 * 3^{n-1}.
std::uint64_t reduced_count(int n);

// Every reduced word of length exactly n, lexicographic in the generator
// indices. Capped at n <= 12 (708588 words).
std::vector<Word> enumerate_reduced(int n);

// Step distribution nu on the generators: strictly positive weights summing
// to 1 within 1e-12.
class WalkMeasure {
 public:
  explicit WalkMeasure(std::array<double, 4> weights);
  static WalkMeasure uniform();

  const std::array<double, 4>& weights() const { return weights_; }
  bool is_symmetric(double tol = 1e-12) const;  // all four weights equal
  Generator sample(SplitMix64& rng) const;      // consumes one double

 private:
  std::array<double, 4> weights_;
};

// n i.i.d. letters in the order drawn, which is the order they act on a
// start point (g_1 first).
std::vector<Generator> sample_walk(const WalkMeasure& nu, int n, SplitMix64& rng);

// Monte Carlo estimate of E[ |reduce(g_1 ... g_n)| / n ]; trial t draws its
// letters from substream(seed, t), so the estimate is reproducible and
// independent of evaluation order.
struct DriftEstimate {
  double mean;
  double std_error;
  int n;
  int trials;
};

DriftEstimate drift_estimate(const WalkMeasure& nu, int n, int trials, std::uint64_t seed);

}  // namespace henlab
