#pragma once

#include "gamma_lab/measures.hpp"
#include "gamma_lab/parallel.hpp"
#include "gamma_lab/polynomial.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gamma_lab {

/// Draws coordinates of sample points. Coordinate i of sample s depends only
/// on (seed, s, i): Gaussian coordinates come in Box-Muller pairs from lane
/// i/2, Gamma coordinates from lane i, Beta coordinates from two Gamma
/// variates on lane i (one stream for integer a, b; tags 0 and 1 otherwise). Lower-dimensional draws are therefore
/// prefixes of higher-dimensional ones under the same seed.
class PointSampler {
 public:
  explicit PointSampler(MeasureFamily family);

  const MeasureFamily& family() const noexcept { return family_; }

  /// Fills out[0..m) with coordinates 1..m of sample `index`.
  void fill(std::uint64_t seed, std::uint64_t index, std::span<double> out) const;

 private:
  MeasureFamily family_;
  double shape_a_ = 1.0;
  double shape_b_ = 1.0;
  bool integer_shapes_ = false;
};

/// n draws of an m-dimensional product measure, row-major.
struct SampleMatrix {
  MeasureFamily family;
  std::size_t dimension = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * dimension, dimension}; }
};

/// n i.i.d. draws from mu; bit-identical for a given seed at any thread count.
SampleMatrix sample(const ProductMeasure& mu, std::size_t n, std::uint64_t seed, unsigned threads = 1);

/// CSV export: '#' header lines recording seed, m, n and family, then one row per draw.
void write_samples_csv(std::ostream& os, const SampleMatrix& s);

/// Polynomial flattened for fast double evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const RealPolynomial& p);
  explicit CompiledPolynomial(const ExactPolynomial& p) : CompiledPolynomial(to_real(p)) {}

  std::size_t dimension() const noexcept { return dimension_; }
  /// x must hold at least dimension() coordinates.
  double operator()(std::span<const double> x) const noexcept;

 private:
  struct Factor {
    std::uint32_t index;  // 0-based
    std::uint32_t exponent;
  };
  std::size_t dimension_ = 0;
  std::vector<double> coefs_;
  std::vector<std::uint32_t> offsets_;  // term t owns factors_[offsets_[t], offsets_[t+1])
  std::vector<Factor> factors_;
};

/// Scalar draws F = Q(X) with provenance.
struct SampleSet {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::string provenance;

  std::size_t size() const noexcept { return values.size(); }
};

/// Values of several functionals on shared draws X^(1..n) of `family`
/// (common random numbers). The sampled dimension is the largest functional
/// dimension; smaller functionals read a prefix of each point.
std::vector<std::vector<double>> evaluate_on_shared_draws(std::span<const CompiledPolynomial> functionals,
                                                          const MeasureFamily& family, std::size_t n,
                                                          std::uint64_t seed, unsigned threads = 1);

/// Draws of Q(X) with X ~ mu; Q.dimension() must equal mu.dimension.
SampleSet functional_samples(const RealPolynomial& q, const ProductMeasure& mu, std::size_t n, std::uint64_t seed,
                             unsigned threads = 1);

/// Reads a SampleSet CSV (one value per row, '#' header lines). Multi-column
/// files contribute their first column.
SampleSet read_sample_set(std::istream& is, const std::string& name);

void write_sample_set(std::ostream& os, const SampleSet& s);

}  // namespace gamma_lab
