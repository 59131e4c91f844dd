#include "henlab/group.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace henlab {

namespace {
constexpr char kTokens[4] = {'a', 'b', 'A', 'B'};
}

char token(Generator g) { return kTokens[static_cast<unsigned>(g)]; }

Generator generator_from_token(char c) {
  for (unsigned i = 0; i < 4; ++i)
    if (kTokens[i] == c) return static_cast<Generator>(i);
  throw std::invalid_argument(std::string("unknown generator token '") + c + "'");
}

bool is_reduced(std::span<const Generator> letters) {
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i] == inverse(letters[i - 1])) return false;
  return true;
}

Word reduce(std::span<const Generator> letters) {
  Word w;
  w.letters.reserve(letters.size());
  for (const Generator g : letters) {
    if (!w.letters.empty() && w.letters.back() == inverse(g))
      w.letters.pop_back();
    else
      w.letters.push_back(g);
  }
  return w;
}

Word concat(const Word& u, const Word& v) {
  Word w = u;
  for (const Generator g : v.letters) {
    if (!w.letters.empty() && w.letters.back() == inverse(g))
      w.letters.pop_back();
    else
      w.letters.push_back(g);
  }
  return w;
}

Word inverse(const Word& w) {
  Word r;
  r.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    r.letters.push_back(inverse(*it));
  return r;
}

std::string to_string(const Word& w) {
  if (w.letters.empty()) return "e";
  std::string s;
  s.reserve(w.letters.size());
  for (const Generator g : w.letters) s.push_back(token(g));
  return s;
}

Word word_from_string(std::string_view s) {
  if (s == "e") return {};
  std::vector<Generator> letters;
  letters.reserve(s.size());
  for (const char c : s) letters.push_back(generator_from_token(c));
  return reduce(letters);
}

std::uint64_t reduced_count(int n) {
  if (n < 0) throw std::invalid_argument("reduced_count: negative length");
  if (n == 0) return 1;
  std::uint64_t c = 4;
  for (int i = 1; i < n; ++i) c *= 3;
  return c;
}

std::vector<Word> enumerate_reduced(int n) {
  if (n < 0 || n > 12)
    throw std::invalid_argument("enumerate_reduced: length must lie in [0, 12]");
  std::vector<Word> out;
  out.reserve(reduced_count(n));
  Word cur;
  cur.letters.reserve(n);
  const auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      out.push_back(cur);
      return;
    }
    for (unsigned i = 0; i < 4; ++i) {
      const Generator g = static_cast<Generator>(i);
      if (!cur.letters.empty() && cur.letters.back() == inverse(g)) continue;
      cur.letters.push_back(g);
      self(self, depth + 1);
      cur.letters.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

WalkMeasure::WalkMeasure(std::array<double, 4> weights) : weights_(weights) {
  double sum = 0.0;
  for (const double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("WalkMeasure: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("WalkMeasure: weights must sum to 1");
}

WalkMeasure WalkMeasure::uniform() { return WalkMeasure({0.25, 0.25, 0.25, 0.25}); }

bool WalkMeasure::is_symmetric(double tol) const {
  for (int i = 1; i < 4; ++i)
    if (std::abs(weights_[i] - weights_[0]) > tol) return false;
  return true;
}

Generator WalkMeasure::sample(SplitMix64& rng) const {
  const double u = rng.next_double();
  double acc = 0.0;
  for (unsigned i = 0; i < 3; ++i) {
    acc += weights_[i];
    if (u < acc) return static_cast<Generator>(i);
  }
  return Generator::H2Inv;
}

std::vector<Generator> sample_walk(const WalkMeasure& nu, int n, SplitMix64& rng) {
  if (n < 0) throw std::invalid_argument("sample_walk: negative length");
  std::vector<Generator> letters(n);
  for (Generator& g : letters) g = nu.sample(rng);
  return letters;
}

DriftEstimate drift_estimate(const WalkMeasure& nu, int n, int trials, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("drift_estimate: n must be >= 1");
  if (trials < 1) throw std::invalid_argument("drift_estimate: trials must be >= 1");
  double sum = 0.0, sum_sq = 0.0;
  std::vector<Generator> stack;
  stack.reserve(n);
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(t));
    stack.clear();
    for (int i = 0; i < n; ++i) {
      const Generator g = nu.sample(rng);
      if (!stack.empty() && stack.back() == inverse(g))
        stack.pop_back();
      else
        stack.push_back(g);
    }
    const double ratio = static_cast<double>(stack.size()) / n;
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  DriftEstimate e{sum / trials, 0.0, n, trials};
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
    e.std_error = std::sqrt(var / trials);
  }
  return e;
}

}  // namespace henlab
