#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mallows {

/**
 * A permutation of [n] = {1,...,n} in one-line notation: word()[i] is the
 * value at (0-based) position i, values are 1-based. Immutable after
 * construction and safe to share across threads.
 */
class Permutation {
public:
  Permutation() = default;  // the empty permutation (n = 0)

  /// Validates that `word` is a bijection on {1..n}; throws std::invalid_argument.
  explicit Permutation(std::vector<int> word);

  static Permutation identity(int n);

  int size() const { return static_cast<int>(word_.size()); }
  int operator[](int pos) const { return word_[static_cast<std::size_t>(pos)]; }
  const std::vector<int>& word() const { return word_; }
  std::span<const int> span() const { return word_; }

  Permutation reversed() const;
  Permutation inverted() const;

  /// Sub-permutation induced by the given 0-based positions (must be strictly
  /// increasing): the relative order of the selected values, standardized to
  /// {1..k}.
  Permutation induced(std::span<const int> positions) const;

  bool operator==(const Permutation&) const = default;

private:
  std::vector<int> word_;
};

/// Number of pairs i < j with word[i] > word[j]. O(n log n).
long long inversions(std::span<const int> word);
inline long long inversions(const Permutation& p) { return inversions(p.span()); }

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

enum class PatternTag { P123, P132, P213, P231, P312, P321 };

/// The six tags in enum order, convenient for sweeps.
inline constexpr PatternTag kAllTags[] = {PatternTag::P123, PatternTag::P132,
                                          PatternTag::P213, PatternTag::P231,
                                          PatternTag::P312, PatternTag::P321};

const char* tag_name(PatternTag t);
Permutation tag_word(PatternTag t);

/// Tag of the reversed pattern: 123<->321, 132<->231, 213<->312.
PatternTag tag_reversed(PatternTag t);
/// Tag of the inverse pattern: fixes 123, 132, 213, 321; swaps 231<->312.
PatternTag tag_inverted(PatternTag t);

/**
 * A pattern to search for: one of the six length-3 tags (fast detectors),
 * or a generic permutation of length >= 2 handled by the reference matcher.
 * Generic patterns longer than 4 are rejected at containment time.
 */
class Pattern {
public:
  /*implicit*/ Pattern(PatternTag t) : tag_(t), word_(tag_word(t)) {}

  /// Generic pattern; length-3 words collapse to their tag.
  explicit Pattern(Permutation word);

  bool is_tag() const { return tag_.has_value(); }
  PatternTag tag() const { return *tag_; }
  const Permutation& word() const { return word_; }
  int size() const { return word_.size(); }

  Pattern reversed() const;
  Pattern inverted() const;

  std::string name() const;
  /// Accepts "123".."321" and generic words in either permutation syntax.
  static std::optional<Pattern> parse(std::string_view text);

  bool operator==(const Pattern&) const = default;

private:
  std::optional<PatternTag> tag_;
  Permutation word_;
};

/**
 * True iff some subsequence of `word` is order-isomorphic to the pattern.
 * A pattern longer than the word is never contained. Length-3 tags run in
 * O(n); generic patterns use the reference matcher (length <= 4 enforced).
 */
bool contains(std::span<const int> word, const Pattern& t);
inline bool contains(const Permutation& p, const Pattern& t) { return contains(p.span(), t); }
inline bool avoids(std::span<const int> word, const Pattern& t) { return !contains(word, t); }
inline bool avoids(const Permutation& p, const Pattern& t) { return !contains(p.span(), t); }

/// Reference matcher: exhaustive subsequence search, any pattern length.
/// The shadow oracle for the fast per-tag detectors.
bool contains_reference(std::span<const int> word, std::span<const int> pattern);

// ---------------------------------------------------------------------------
// Lehmer words (right-displacement encoding of the online construction)
// ---------------------------------------------------------------------------

/**
 * x[j-1] is the number of already-placed values lying to the right of j when
 * 1,...,n are placed in increasing order; 0 <= x[j-1] <= j-1 and x[0] = 0.
 * sum(x) equals the inversion count of the decoded permutation.
 */
std::vector<int> lehmer_encode(const Permutation& p);

/// Inverse of lehmer_encode; throws std::invalid_argument on out-of-range entries.
Permutation lehmer_decode(std::span<const int> x);

/// Allocation-free decode: writes the word into `out` (resized to x.size()).
void lehmer_decode_into(std::span<const int> x, std::vector<int>& out);

// ---------------------------------------------------------------------------
// Enumeration (lexicographic)
// ---------------------------------------------------------------------------

/// Largest n accepted by the enumeration helpers (n! must stay mergeable work).
inline constexpr int kMaxEnumerationSize = 14;

std::uint64_t factorial_u64(int n);  // n <= 20

/// Permutation of [n] with the given 0-based rank in lexicographic order.
Permutation nth_permutation(int n, std::uint64_t rank);

/// Deterministic split of the rank space [0, n!) into `blocks` contiguous
/// half-open ranges covering it exactly once (some may be empty).
std::vector<std::pair<std::uint64_t, std::uint64_t>> partition_ranks(std::uint64_t total,
                                                                     int blocks);

namespace detail {
void check_enumeration_size(int n);
void advance_lex(std::vector<int>& word);
}  // namespace detail

/**
 * Visit permutations of [n] with lexicographic ranks in [first, last),
 * in lexicographic order. fn receives a span valid only during the call.
 */
template <typename Fn>
void for_each_permutation(int n, std::uint64_t first, std::uint64_t last, Fn&& fn) {
  detail::check_enumeration_size(n);
  if (first >= last) return;
  if (n == 0) {
    fn(std::span<const int>{});
    return;
  }
  std::vector<int> word = nth_permutation(n, first).word();
  for (std::uint64_t r = first; r < last; ++r) {
    fn(std::span<const int>(word));
    detail::advance_lex(word);
  }
}

/// Visit all n! permutations of [n] in lexicographic order.
template <typename Fn>
void for_each_permutation(int n, Fn&& fn) {
  detail::check_enumeration_size(n);
  for_each_permutation(n, 0, factorial_u64(n), std::forward<Fn>(fn));
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

/// Digit string for n <= 9 ("3214"), space-separated integers otherwise.
std::string format_permutation(const Permutation& p);

/// Accepts both formats; throws std::invalid_argument on malformed input.
Permutation parse_permutation(std::string_view text);

}  // namespace mallows
