#include "mallows/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mallows {

MallowsParam MallowsParam::reduce(double raw) {
  if (!(raw > 0.0) || !std::isfinite(raw))
    throw std::domain_error("Mallows parameter q must be finite and positive");
  if (raw > 1.0) return {1.0 / raw, true};
  return {raw, false};
}

double normalizer(int n, double q) {
  if (n < 0) throw std::invalid_argument("normalizer: n must be nonnegative");
  if (!(q > 0.0) || q > 1.0) throw std::domain_error("normalizer: q must be in (0, 1]");
  double z = 1.0;
  if (q == 1.0) {
    for (int k = 2; k <= n; ++k) z *= k;
    return z;
  }
  double qk = 1.0;
  for (int k = 1; k <= n; ++k) {
    qk *= q;
    z *= (1.0 - qk) / (1.0 - q);
  }
  return z;
}

mpq_class normalizer_exact(int n, const mpq_class& q) {
  mpq_class z(1);
  mpq_class qk(1);
  for (int k = 1; k <= n; ++k) {
    qk *= q;
    // (1 - q^k)/(1 - q) = 1 + q + ... + q^{k-1}; the ratio form is fine
    // for any rational q != 1.
    if (q == 1) {
      z *= k;
    } else {
      z *= (1 - qk) / (1 - q);
    }
  }
  z.canonicalize();
  return z;
}

double pmf(const Permutation& p, double q) {
  const MallowsParam par = MallowsParam::reduce(q);
  const Permutation& eff = par.reversed ? p.reversed() : p;
  const long long inv = inversions(eff);
  if (par.q == 1.0) return 1.0 / normalizer(p.size(), 1.0);
  return std::exp(static_cast<double>(inv) * std::log(par.q)) / normalizer(p.size(), par.q);
}

mpq_class pmf_exact(const Permutation& p, const mpq_class& q) {
  if (q <= 0) throw std::domain_error("pmf_exact: q must be positive");
  const unsigned long inv = static_cast<unsigned long>(inversions(p));
  mpq_class r = mpq_pow(q, inv) / normalizer_exact(p.size(), q);
  r.canonicalize();
  return r;
}

double truncated_geometric_pmf(int j, int m, double q) {
  if (j < 1) throw std::invalid_argument("truncated_geometric_pmf: j must be >= 1");
  if (m < 0 || m > j - 1)
    throw std::domain_error("truncated_geometric_pmf: m outside {0..j-1}");
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("truncated_geometric_pmf: q must be in (0, 1]");
  if (q == 1.0) return 1.0 / j;
  return (1.0 - q) * std::pow(q, m) / (1.0 - std::pow(q, j));
}

mpq_class truncated_geometric_pmf_exact(int j, int m, const mpq_class& q) {
  if (j < 1 || m < 0 || m > j - 1)
    throw std::domain_error("truncated_geometric_pmf_exact: m outside {0..j-1}");
  mpq_class r = (1 - q) * mpq_pow(q, static_cast<unsigned long>(m)) /
                (1 - mpq_pow(q, static_cast<unsigned long>(j)));
  r.canonicalize();
  return r;
}

namespace {

// m = floor(log(1 - u (1 - q^j)) / log q), clamped to {0..j-1}; the clamp
// absorbs the floating-point edge as u -> 1.
int draw_truncated_geometric(int j, double q, double one_minus_qj, SplitRng& rng) {
  const double u = rng.next_unit();
  if (q == 1.0) {
    const int m = static_cast<int>(u * j);
    return m > j - 1 ? j - 1 : m;
  }
  const double m = std::floor(std::log1p(-u * one_minus_qj) / std::log(q));
  if (!(m > 0.0)) return 0;
  if (m > j - 1) return j - 1;
  return static_cast<int>(m);
}

}  // namespace

int sample_truncated_geometric(int j, double q, SplitRng& rng) {
  if (j < 1) throw std::invalid_argument("sample_truncated_geometric: j must be >= 1");
  if (!(q > 0.0) || q > 1.0)
    throw std::domain_error("sample_truncated_geometric: q must be in (0, 1]");
  return draw_truncated_geometric(j, q, 1.0 - std::pow(q, j), rng);
}

double identity_probability(int n, double q) {
  if (n < 1) throw std::invalid_argument("identity_probability: n must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("identity_probability: q must be in (0,1)");
  double num = 1.0, den = 1.0, qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= q;
    num *= 1.0 - q;
    den *= 1.0 - qj;
  }
  return num / den;
}

MallowsSampler::MallowsSampler(int n, double q) : n_(n), param_(MallowsParam::reduce(q)) {
  if (n < 1) throw std::invalid_argument("MallowsSampler: n must be >= 1");
  one_minus_qj_.resize(static_cast<std::size_t>(n));
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= param_.q;
    one_minus_qj_[static_cast<std::size_t>(j - 1)] = 1.0 - qj;
  }
}

void MallowsSampler::sample_into(SplitRng& rng, std::vector<int>& word) {
  displacement_.resize(static_cast<std::size_t>(n_));
  for (int j = 1; j <= n_; ++j)
    displacement_[static_cast<std::size_t>(j - 1)] =
        draw_truncated_geometric(j, param_.q, one_minus_qj_[static_cast<std::size_t>(j - 1)], rng);
  lehmer_decode_into(displacement_, word);
  if (param_.reversed) std::reverse(word.begin(), word.end());
}

Permutation MallowsSampler::sample(SplitRng& rng) {
  std::vector<int> word;
  sample_into(rng, word);
  return Permutation(std::move(word));
}

Permutation sample_permutation(int n, double q, SplitRng& rng) {
  MallowsSampler sampler(n, q);
  return sampler.sample(rng);
}

}  // namespace mallows
