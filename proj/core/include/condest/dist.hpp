#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace condest {

// Element ids run from 1 to N.
using Element = std::size_t;

// Finite probability mass function over {1..N}. Immutable after construction.
class Distribution {
 public:
  Distribution() = default;

  std::size_t size() const { return masses_.size(); }
  double mass(Element x) const;
  const std::vector<double>& masses() const { return masses_; }
  // Ids with positive mass, ascending.
  const std::vector<Element>& support() const { return support_; }

  // Unconditional draw by inverse transform over the support.
  Element sample(std::mt19937_64& rng) const;

 private:
  friend Distribution make_distribution(std::vector<double> weights);
  std::vector<double> masses_;
  std::vector<Element> support_;
  std::vector<double> cumulative_;
};

struct ScalePartition {
  Element anchor = 0;
  std::vector<Element> light;
  std::vector<Element> medium;
  std::vector<Element> heavy;
};

struct DistanceReport {
  double tv = 0.0;
  double min_perm_tv = 0.0;
};

// Normalizes non-negative weights; throws ValidationError on negative,
// non-finite or all-zero input.
Distribution make_distribution(std::vector<double> weights);

// Total mass of elements no heavier than x.
double cdf_mu(const Distribution& d, Element x);

// Light: mu(y) <= mu(x); medium: mu(x) < mu(y) < 1.2 mu(x); heavy: the rest.
ScalePartition scale_partition(const Distribution& d, Element x);

double tv_distance(const Distribution& a, const Distribution& b);

// Minimum TV distance over relabelings of b, via sorted matching.
double min_perm_tv(const Distribution& a, const Distribution& b);
double min_perm_tv(std::vector<double> a, std::vector<double> b);

DistanceReport distance_report(const Distribution& a, const Distribution& b);

// Uniform over a random support containing each element w.p. 2^-k.
Distribution gen_dk(std::size_t n, unsigned k, std::uint64_t seed);

struct NamedFamily {
  enum class Kind { Uniform, Zipf, Geometric, PointMass };
  Kind kind = Kind::Uniform;
  double param = 0.0;
};

// Parses "uniform", "zipf:S", "geometric:P" or "point_mass".
NamedFamily parse_family(const std::string& text);
Distribution gen_named(const NamedFamily& family, std::size_t n, std::uint64_t seed);

// Dense (one weight per line) or sparse ("id weight" per line) text format.
// Blank lines and lines starting with '#' are skipped. For sparse input the
// domain size is the largest id unless a "# n=<N>" header is present.
Distribution read_distribution(std::istream& in);
Distribution load_distribution(const std::string& path);
void write_distribution(std::ostream& out, const Distribution& d);

}  // namespace condest
