#include "mallows/permutation.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mallows/errors.hpp"

namespace mallows {

Permutation::Permutation(std::vector<int> word) : word_(std::move(word)) {
  const int n = size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int v : word_) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)])
      throw std::invalid_argument("permutation word is not a bijection on {1..n}");
    seen[static_cast<std::size_t>(v - 1)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = i + 1;
  Permutation p;
  p.word_ = std::move(w);
  return p;
}

Permutation Permutation::reversed() const {
  Permutation p;
  p.word_.assign(word_.rbegin(), word_.rend());
  return p;
}

Permutation Permutation::inverted() const {
  Permutation p;
  p.word_.resize(word_.size());
  for (int i = 0; i < size(); ++i)
    p.word_[static_cast<std::size_t>(word_[static_cast<std::size_t>(i)] - 1)] = i + 1;
  return p;
}

Permutation Permutation::induced(std::span<const int> positions) const {
  std::vector<int> values;
  values.reserve(positions.size());
  int prev = -1;
  for (int pos : positions) {
    if (pos <= prev || pos >= size())
      throw std::invalid_argument("induced: positions must be strictly increasing and in range");
    values.push_back(word_[static_cast<std::size_t>(pos)]);
    prev = pos;
  }
  // standardize: replace each value by its rank among the selected values
  std::vector<int> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  Permutation p;
  p.word_.reserve(values.size());
  for (int v : values) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    p.word_.push_back(static_cast<int>(it - sorted.begin()) + 1);
  }
  return p;
}

long long inversions(std::span<const int> word) {
  const int n = static_cast<int>(word.size());
  if (n < 48) {  // quadratic scan beats the tree for small words
    long long inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (word[static_cast<std::size_t>(i)] > word[static_cast<std::size_t>(j)]) ++inv;
    return inv;
  }
  // Fenwick tree over values, scanning right to left.
  std::vector<int> tree(static_cast<std::size_t>(n) + 1, 0);
  auto add = [&](int i) {
    for (; i <= n; i += i & -i) ++tree[static_cast<std::size_t>(i)];
  };
  auto count_leq = [&](int i) {
    int s = 0;
    for (; i > 0; i -= i & -i) s += tree[static_cast<std::size_t>(i)];
    return s;
  };
  long long inv = 0;
  for (int i = n - 1; i >= 0; --i) {
    const int v = word[static_cast<std::size_t>(i)];
    inv += count_leq(v - 1);
    add(v);
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

const char* tag_name(PatternTag t) {
  switch (t) {
    case PatternTag::P123: return "123";
    case PatternTag::P132: return "132";
    case PatternTag::P213: return "213";
    case PatternTag::P231: return "231";
    case PatternTag::P312: return "312";
    case PatternTag::P321: return "321";
  }
  return "?";
}

Permutation tag_word(PatternTag t) {
  switch (t) {
    case PatternTag::P123: return Permutation({1, 2, 3});
    case PatternTag::P132: return Permutation({1, 3, 2});
    case PatternTag::P213: return Permutation({2, 1, 3});
    case PatternTag::P231: return Permutation({2, 3, 1});
    case PatternTag::P312: return Permutation({3, 1, 2});
    case PatternTag::P321: return Permutation({3, 2, 1});
  }
  return Permutation();
}

PatternTag tag_reversed(PatternTag t) {
  switch (t) {
    case PatternTag::P123: return PatternTag::P321;
    case PatternTag::P132: return PatternTag::P231;
    case PatternTag::P213: return PatternTag::P312;
    case PatternTag::P231: return PatternTag::P132;
    case PatternTag::P312: return PatternTag::P213;
    case PatternTag::P321: return PatternTag::P123;
  }
  return t;
}

PatternTag tag_inverted(PatternTag t) {
  switch (t) {
    case PatternTag::P231: return PatternTag::P312;
    case PatternTag::P312: return PatternTag::P231;
    default: return t;
  }
}

namespace {

std::optional<PatternTag> tag_of_word(const Permutation& w) {
  if (w.size() != 3) return std::nullopt;
  for (PatternTag t : kAllTags)
    if (tag_word(t) == w) return t;
  return std::nullopt;
}

}  // namespace

Pattern::Pattern(Permutation word) : word_(std::move(word)) {
  if (word_.size() < 2) throw std::invalid_argument("pattern must have length >= 2");
  tag_ = tag_of_word(word_);
}

Pattern Pattern::reversed() const {
  if (tag_) return Pattern(tag_reversed(*tag_));
  return Pattern(word_.reversed());
}

Pattern Pattern::inverted() const {
  if (tag_) return Pattern(tag_inverted(*tag_));
  return Pattern(word_.inverted());
}

std::string Pattern::name() const {
  if (tag_) return tag_name(*tag_);
  return format_permutation(word_);
}

std::optional<Pattern> Pattern::parse(std::string_view text) {
  try {
    Permutation w = parse_permutation(text);
    if (w.size() < 2) return std::nullopt;
    return Pattern(std::move(w));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

namespace {

// Strictly increasing subsequence of length 3, reading values through `at`.
template <typename At>
bool has_increasing_triple(int n, At at) {
  int low = std::numeric_limits<int>::max();
  int mid = std::numeric_limits<int>::max();
  for (int i = 0; i < n; ++i) {
    const int v = at(i);
    if (v < low)
      low = v;
    else if (v < mid)
      mid = v;  // v extends a pair (low, v)
    else if (v > mid)
      return true;
  }
  return false;
}

// 132 occurrence (i<j<k with s_i < s_k < s_j), reading values through `at`.
// Right-to-left scan; `third` is the best middle-value candidate so far.
template <typename At>
bool has_132(int n, At at) {
  std::vector<int> stack;
  int third = std::numeric_limits<int>::min();
  for (int i = n - 1; i >= 0; --i) {
    const int v = at(i);
    if (v < third) return true;
    while (!stack.empty() && stack.back() < v) {
      third = stack.back();
      stack.pop_back();
    }
    stack.push_back(v);
  }
  return false;
}

// The six tags reduce to two cores via position reversal and value
// complement: reversing maps 321->123, 231->132; complementing values
// maps 312->132; both together map 213->132.
bool contains_tag(std::span<const int> w, PatternTag t) {
  const int n = static_cast<int>(w.size());
  if (n < 3) return false;
  const int c = n + 1;
  auto fwd = [&](int i) { return w[static_cast<std::size_t>(i)]; };
  auto rev = [&](int i) { return w[static_cast<std::size_t>(n - 1 - i)]; };
  auto fwd_comp = [&](int i) { return c - w[static_cast<std::size_t>(i)]; };
  auto rev_comp = [&](int i) { return c - w[static_cast<std::size_t>(n - 1 - i)]; };
  switch (t) {
    case PatternTag::P123: return has_increasing_triple(n, fwd);
    case PatternTag::P321: return has_increasing_triple(n, rev);
    case PatternTag::P132: return has_132(n, fwd);
    case PatternTag::P231: return has_132(n, rev);
    case PatternTag::P312: return has_132(n, fwd_comp);
    case PatternTag::P213: return has_132(n, rev_comp);
  }
  return false;
}

// Depth-first subsequence match: extend a partial occurrence one pattern
// position at a time, checking order-isomorphism against already-chosen
// values only.
bool match_reference(std::span<const int> w, std::span<const int> t, std::size_t ti,
                     std::size_t wi, std::vector<int>& chosen) {
  if (ti == t.size()) return true;
  for (std::size_t i = wi; i + (t.size() - ti) <= w.size(); ++i) {
    bool ok = true;
    for (std::size_t a = 0; a < ti && ok; ++a)
      ok = (chosen[a] < w[i]) == (t[a] < t[ti]);
    if (!ok) continue;
    chosen.push_back(w[i]);
    if (match_reference(w, t, ti + 1, i + 1, chosen)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace

bool contains_reference(std::span<const int> word, std::span<const int> pattern) {
  if (pattern.size() > word.size()) return false;
  std::vector<int> chosen;
  chosen.reserve(pattern.size());
  return match_reference(word, pattern, 0, 0, chosen);
}

bool contains(std::span<const int> word, const Pattern& t) {
  if (static_cast<std::size_t>(t.size()) > word.size()) return false;
  if (t.is_tag()) return contains_tag(word, t.tag());
  if (t.size() > 4)
    throw ResourceLimitError("generic pattern containment is limited to length <= 4");
  return contains_reference(word, t.word().span());
}

// ---------------------------------------------------------------------------
// Lehmer words
// ---------------------------------------------------------------------------

std::vector<int> lehmer_encode(const Permutation& p) {
  const int n = p.size();
  // position of each value, then count previously-inserted positions to its
  // right with a Fenwick tree over positions, inserting values 1..n.
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(p[i] - 1)] = i + 1;  // 1-based
  std::vector<int> tree(static_cast<std::size_t>(n) + 1, 0);
  auto add = [&](int i) {
    for (; i <= n; i += i & -i) ++tree[static_cast<std::size_t>(i)];
  };
  auto count_leq = [&](int i) {
    int s = 0;
    for (; i > 0; i -= i & -i) s += tree[static_cast<std::size_t>(i)];
    return s;
  };
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const int pj = pos[static_cast<std::size_t>(j - 1)];
    x[static_cast<std::size_t>(j - 1)] = (j - 1) - count_leq(pj);
    add(pj);
  }
  return x;
}

void lehmer_decode_into(std::span<const int> x, std::vector<int>& out) {
  const int n = static_cast<int>(x.size());
  for (int j = 1; j <= n; ++j) {
    const int xj = x[static_cast<std::size_t>(j - 1)];
    if (xj < 0 || xj > j - 1)
      throw std::invalid_argument("lehmer word entry out of range [0, j-1]");
  }
  out.assign(static_cast<std::size_t>(n), 0);
  // Place j = n..1: value j occupies the (j-1-x_j)-th still-free slot,
  // selected with a Fenwick tree of free-slot counts.
  std::vector<int> tree(static_cast<std::size_t>(n) + 1, 0);
  auto add = [&](int i, int d) {
    for (; i <= n; i += i & -i) tree[static_cast<std::size_t>(i)] += d;
  };
  for (int i = 1; i <= n; ++i) add(i, 1);
  auto select = [&](int k) {  // 0-based k-th free slot, as 1-based position
    int pos = 0, rem = k + 1;
    int log = 1;
    while ((log << 1) <= n) log <<= 1;
    for (; log > 0; log >>= 1) {
      const int next = pos + log;
      if (next <= n && tree[static_cast<std::size_t>(next)] < rem) {
        pos = next;
        rem -= tree[static_cast<std::size_t>(pos)];
      }
    }
    return pos + 1;
  };
  for (int j = n; j >= 1; --j) {
    const int slot = select(j - 1 - x[static_cast<std::size_t>(j - 1)]);
    out[static_cast<std::size_t>(slot - 1)] = j;
    add(slot, -1);
  }
}

Permutation lehmer_decode(std::span<const int> x) {
  std::vector<int> word;
  lehmer_decode_into(x, word);
  return Permutation(std::move(word));
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::uint64_t factorial_u64(int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("factorial_u64: n out of range");
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

namespace detail {

void check_enumeration_size(int n) {
  if (n < 0) throw std::invalid_argument("enumeration size must be nonnegative");
  if (n > kMaxEnumerationSize)
    throw ResourceLimitError("permutation enumeration is limited to n <= " +
                             std::to_string(kMaxEnumerationSize));
}

void advance_lex(std::vector<int>& word) {
  std::next_permutation(word.begin(), word.end());
}

}  // namespace detail

Permutation nth_permutation(int n, std::uint64_t rank) {
  detail::check_enumeration_size(n);
  if (n == 0) {
    if (rank != 0) throw std::invalid_argument("rank out of range");
    return Permutation();
  }
  if (rank >= factorial_u64(n)) throw std::invalid_argument("rank out of range");
  std::vector<int> remaining(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) remaining[static_cast<std::size_t>(i)] = i + 1;
  std::vector<int> word;
  word.reserve(static_cast<std::size_t>(n));
  std::uint64_t r = rank;
  for (int i = n - 1; i >= 0; --i) {
    const std::uint64_t f = factorial_u64(i);
    const std::size_t d = static_cast<std::size_t>(r / f);
    r %= f;
    word.push_back(remaining[d]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return Permutation(std::move(word));
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> partition_ranks(std::uint64_t total,
                                                                     int blocks) {
  if (blocks < 1) throw std::invalid_argument("partition_ranks: need at least one block");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(static_cast<std::size_t>(blocks));
  const std::uint64_t base = total / static_cast<std::uint64_t>(blocks);
  const std::uint64_t rem = total % static_cast<std::uint64_t>(blocks);
  std::uint64_t at = 0;
  for (int b = 0; b < blocks; ++b) {
    const std::uint64_t len = base + (static_cast<std::uint64_t>(b) < rem ? 1 : 0);
    out.emplace_back(at, at + len);
    at += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

std::string format_permutation(const Permutation& p) {
  std::ostringstream os;
  if (p.size() <= 9) {
    for (int v : p.word()) os << v;
  } else {
    for (int i = 0; i < p.size(); ++i) {
      if (i) os << ' ';
      os << p[i];
    }
  }
  return os.str();
}

Permutation parse_permutation(std::string_view text) {
  std::vector<int> word;
  const bool spaced = text.find_first_of(" \t") != std::string_view::npos;
  if (spaced) {
    std::istringstream is{std::string(text)};
    int v = 0;
    while (is >> v) word.push_back(v);
    if (!is.eof()) throw std::invalid_argument("malformed permutation: " + std::string(text));
  } else {
    for (char ch : text) {
      if (!std::isdigit(static_cast<unsigned char>(ch)))
        throw std::invalid_argument("malformed permutation: " + std::string(text));
      word.push_back(ch - '0');
    }
  }
  return Permutation(std::move(word));
}

}  // namespace mallows
