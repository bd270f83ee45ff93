#include "gamma_lab/sampling.hpp"

#include "gamma_lab/rng.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace gamma_lab {

PointSampler::PointSampler(MeasureFamily family) : family_(std::move(family)) {
  if (family_.kind() == FamilyKind::gamma) shape_a_ = to_double(family_.r());
  if (family_.kind() == FamilyKind::beta) {
    shape_a_ = to_double(family_.a());
    shape_b_ = to_double(family_.b());
    integer_shapes_ = shape_a_ <= 16.0 && shape_b_ <= 16.0 && shape_a_ == std::floor(shape_a_) &&
                      shape_b_ == std::floor(shape_b_);
  }
}

void PointSampler::fill(std::uint64_t seed, std::uint64_t index, std::span<double> out) const {
  const std::size_t m = out.size();
  switch (family_.kind()) {
    case FamilyKind::gaussian:
      for (std::size_t j = 0; j < m; j += 2) {
        CounterStream stream(seed, index, static_cast<std::uint32_t>(j / 2));
        out[j] = stream.normal();
        if (j + 1 < m) out[j + 1] = stream.normal();
      }
      break;
    case FamilyKind::gamma:
      for (std::size_t j = 0; j < m; ++j) {
        CounterStream stream(seed, index, static_cast<std::uint32_t>(j));
        out[j] = stream.gamma(shape_a_);
      }
      break;
    case FamilyKind::beta:
      if (integer_shapes_) {
        // Both gamma variates from one stream: a + b uniforms, two logs.
        for (std::size_t j = 0; j < m; ++j) {
          CounterStream s(seed, index, static_cast<std::uint32_t>(j), 0);
          double pa = 1.0;
          double pb = 1.0;
          for (int k = 0; k < static_cast<int>(shape_a_); ++k) pa *= s.uniform();
          for (int k = 0; k < static_cast<int>(shape_b_); ++k) pb *= s.uniform();
          const double ga = -std::log(pa);
          const double gb = -std::log(pb);
          out[j] = 1.0 - 2.0 * (ga / (ga + gb));
        }
        break;
      }
      for (std::size_t j = 0; j < m; ++j) {
        CounterStream sa(seed, index, static_cast<std::uint32_t>(j), 0);
        CounterStream sb(seed, index, static_cast<std::uint32_t>(j), 1);
        const double ga = sa.gamma(shape_a_);
        const double gb = sb.gamma(shape_b_);
        out[j] = 1.0 - 2.0 * (ga / (ga + gb));
      }
      break;
  }
}

SampleMatrix sample(const ProductMeasure& mu, std::size_t n, std::uint64_t seed, unsigned threads) {
  if (n == 0) throw PreconditionError("sample count must be at least 1");
  SampleMatrix out{mu.family, mu.dimension, n, seed, std::vector<double>(n * mu.dimension)};
  const PointSampler sampler(mu.family);
  parallel_blocks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      sampler.fill(seed, i, std::span<double>(out.values.data() + i * mu.dimension, mu.dimension));
    }
  });
  return out;
}

void write_samples_csv(std::ostream& os, const SampleMatrix& s) {
  os << "# seed=" << s.seed << "\n# m=" << s.dimension << "\n# n=" << s.count << "\n# family=" << s.family.name()
     << "\n";
  for (std::size_t j = 0; j < s.dimension; ++j) os << (j ? "," : "") << "x" << (j + 1);
  os << "\n";
  for (std::size_t i = 0; i < s.count; ++i) {
    auto row = s.row(i);
    for (std::size_t j = 0; j < s.dimension; ++j) os << (j ? "," : "") << format_double(row[j]);
    os << "\n";
  }
}

CompiledPolynomial::CompiledPolynomial(const RealPolynomial& p) : dimension_(p.dimension()) {
  coefs_.reserve(p.num_terms());
  offsets_.reserve(p.num_terms() + 1);
  offsets_.push_back(0);
  for (const auto& [m, c] : p.terms()) {
    coefs_.push_back(c);
    for (const auto& [var, exp] : m.factors()) factors_.push_back({var - 1, exp});
    offsets_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }
}

double CompiledPolynomial::operator()(std::span<const double> x) const noexcept {
  double total = 0.0;
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    double v = coefs_[t];
    for (std::uint32_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      const double xi = x[factors_[k].index];
      for (std::uint32_t e = 0; e < factors_[k].exponent; ++e) v *= xi;
    }
    total += v;
  }
  return total;
}

std::vector<std::vector<double>> evaluate_on_shared_draws(std::span<const CompiledPolynomial> functionals,
                                                          const MeasureFamily& family, std::size_t n,
                                                          std::uint64_t seed, unsigned threads) {
  if (n == 0) throw PreconditionError("sample count must be at least 1");
  std::size_t dim = 1;
  for (const auto& f : functionals) dim = std::max(dim, f.dimension());
  std::vector<std::vector<double>> out(functionals.size(), std::vector<double>(n));
  const PointSampler sampler(family);
  parallel_blocks(n, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> x(dim);
    for (std::size_t i = begin; i < end; ++i) {
      sampler.fill(seed, i, x);
      for (std::size_t f = 0; f < functionals.size(); ++f) out[f][i] = functionals[f](x);
    }
  });
  return out;
}

SampleSet functional_samples(const RealPolynomial& q, const ProductMeasure& mu, std::size_t n, std::uint64_t seed,
                             unsigned threads) {
  if (q.dimension() != mu.dimension) {
    throw DimensionError("functional dimension " + std::to_string(q.dimension()) + " differs from measure dimension " +
                         std::to_string(mu.dimension));
  }
  const CompiledPolynomial compiled(q);
  auto values = evaluate_on_shared_draws(std::span<const CompiledPolynomial>(&compiled, 1), mu.family, n, seed, threads);
  std::ostringstream provenance;
  provenance << mu.family.name() << ";m=" << mu.dimension << ";poly=" << std::hex << polynomial_hash(q);
  return SampleSet{std::move(values.front()), seed, provenance.str()};
}

SampleSet read_sample_set(std::istream& is, const std::string& name) {
  SampleSet out;
  out.provenance = "file:" + name;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# seed=", 0) == 0) out.seed = std::stoull(line.substr(7));
      continue;
    }
    std::string first = line.substr(0, line.find(','));
    try {
      std::size_t used = 0;
      double v = std::stod(first, &used);
      out.values.push_back(v);
    } catch (const std::exception&) {
      if (header_seen || !out.values.empty()) throw ConfigError("non-numeric row in sample file " + name + ": " + line);
      header_seen = true;  // column-name row
    }
  }
  if (out.values.empty()) throw ConfigError("sample file " + name + " holds no values");
  return out;
}

void write_sample_set(std::ostream& os, const SampleSet& s) {
  os << "# seed=" << s.seed << "\n# m=1\n# n=" << s.size() << "\n# provenance=" << s.provenance << "\nvalue\n";
  for (double v : s.values) os << format_double(v) << "\n";
}

}  // namespace gamma_lab
