#include "learn/kernels.hpp"

#include <exception>
#include <optional>

#include "learn/experiment.hpp"

namespace learn {

namespace {

bool share_set_ok(std::uint64_t seed, std::size_t index, std::size_t points) {
  const PrimeField& f = PrimeField::mersenne61();
  Rng rng(derive_seed(seed, 0x73686172ULL, index));
  SharedSecret s = generate_share_set(f, points, rng);
  if (interpolate_at_zero(f, s.set.points) != s.polynomial.coefficients.front()) return false;
  FieldElement sum = f.zero();
  for (const SharePoint& p : s.set.points) sum = f.add(sum, p.b);
  return sum == f.one();
}

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Decodes polynomial `index` (base-p digits, constant term first) and reports its value at 0
/// if it passes through every known point.
std::optional<std::uint64_t> candidate(const PrimeField& f, std::size_t terms, std::span<const SharePoint> known,
                                       std::uint64_t index) {
  std::vector<FieldElement> coeffs(terms);
  for (std::size_t i = 0; i < terms; ++i) {
    coeffs[i] = f.element(index % f.modulus());
    index /= f.modulus();
  }
  SecretPolynomial poly{coeffs};
  for (const SharePoint& p : known) {
    if (poly.evaluate(f, p.x) != p.y) return std::nullopt;
  }
  return coeffs.front().value;
}

void check_enumerable(const PrimeField& f, std::size_t terms) {
  if (terms == 0 || f.modulus() > 1024 || power(f.modulus(), terms) > (std::uint64_t{1} << 32)) {
    throw ConfigError("secret histogram: field and degree too large to enumerate");
  }
}

}  // namespace

std::vector<MetricsReport> run_sweep_serial(const std::vector<RunConfig>& configs) {
  std::vector<MetricsReport> out;
  out.reserve(configs.size());
  for (const RunConfig& c : configs) out.push_back(run_experiment(c));
  return out;
}

std::vector<MetricsReport> run_sweep_parallel(const std::vector<RunConfig>& configs) {
  std::vector<MetricsReport> out(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_experiment(configs[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical
      {
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

ShareCheck verify_share_sets_serial(std::uint64_t seed, std::size_t count, std::size_t points) {
  ShareCheck c;
  for (std::size_t i = 0; i < count; ++i) {
    ++c.checked;
    if (!share_set_ok(seed, i, points)) ++c.failures;
  }
  return c;
}

ShareCheck verify_share_sets_parallel(std::uint64_t seed, std::size_t count, std::size_t points) {
  std::uint64_t failures = 0;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for reduction(+ : failures) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (!share_set_ok(seed, static_cast<std::size_t>(i), points)) ++failures;
  }
  return {count, failures};
}

std::vector<std::uint64_t> secret_histogram_serial(const PrimeField& field, std::size_t terms,
                                                   std::span<const SharePoint> known) {
  check_enumerable(field, terms);
  std::vector<std::uint64_t> hist(field.modulus(), 0);
  const std::uint64_t total = power(field.modulus(), terms);
  for (std::uint64_t i = 0; i < total; ++i) {
    if (auto s = candidate(field, terms, known, i)) ++hist[*s];
  }
  return hist;
}

std::vector<std::uint64_t> secret_histogram_parallel(const PrimeField& field, std::size_t terms,
                                                     std::span<const SharePoint> known) {
  check_enumerable(field, terms);
  const std::size_t p = field.modulus();
  const auto total = static_cast<std::int64_t>(power(p, terms));
  std::vector<std::uint64_t> hist(p, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(p, 0);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
      if (auto s = candidate(field, terms, known, static_cast<std::uint64_t>(i))) ++local[*s];
    }
#pragma omp critical
    for (std::size_t v = 0; v < p; ++v) hist[v] += local[v];
  }
  return hist;
}

}  // namespace learn
