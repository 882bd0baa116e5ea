#include "condest/dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "condest/error.hpp"

namespace condest {

namespace {

void check_element(const Distribution& d, Element x) {
  if (x < 1 || x > d.size()) {
    throw ValidationError("element " + std::to_string(x) + " outside 1.." +
                          std::to_string(d.size()));
  }
}

void check_same_domain(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) {
    throw ValidationError("domain sizes differ: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
}

}  // namespace

double Distribution::mass(Element x) const {
  check_element(*this, x);
  return masses_[x - 1];
}

Element Distribution::sample(std::mt19937_64& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

Distribution make_distribution(std::vector<double> weights) {
  if (weights.empty()) throw ValidationError("empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw ValidationError("at least one weight must be positive");

  Distribution d;
  d.masses_ = std::move(weights);
  for (double& w : d.masses_) w /= total;
  double run = 0.0;
  for (std::size_t i = 0; i < d.masses_.size(); ++i) {
    if (d.masses_[i] > 0.0) {
      d.support_.push_back(i + 1);
      run += d.masses_[i];
      d.cumulative_.push_back(run);
    }
  }
  return d;
}

double cdf_mu(const Distribution& d, Element x) {
  const double mx = d.mass(x);
  double s = 0.0;
  for (double m : d.masses()) {
    if (m <= mx) s += m;
  }
  return s;
}

ScalePartition scale_partition(const Distribution& d, Element x) {
  const double mx = d.mass(x);
  ScalePartition p;
  p.anchor = x;
  for (Element y = 1; y <= d.size(); ++y) {
    if (y == x) continue;
    const double my = d.masses()[y - 1];
    if (my <= mx) {
      p.light.push_back(y);
    } else if (my >= 1.2 * mx) {
      p.heavy.push_back(y);
    } else {
      p.medium.push_back(y);
    }
  }
  return p;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  check_same_domain(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.masses()[i] - b.masses()[i]);
  return 0.5 * s;
}

double min_perm_tv(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw ValidationError("domain sizes differ");
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

double min_perm_tv(const Distribution& a, const Distribution& b) {
  check_same_domain(a, b);
  return min_perm_tv(a.masses(), b.masses());
}

DistanceReport distance_report(const Distribution& a, const Distribution& b) {
  return {tv_distance(a, b), min_perm_tv(a, b)};
}

Distribution gen_dk(std::size_t n, unsigned k, std::uint64_t seed) {
  if (n == 0) throw ValidationError("domain size must be positive");
  if (k >= 64 || (k > 0 && (std::size_t{1} << k) > n)) {
    throw ValidationError("gen_dk needs 2^k <= N");
  }
  std::mt19937_64 rng(seed);
  const double p = std::ldexp(1.0, -static_cast<int>(k));
  std::bernoulli_distribution coin(p);
  std::vector<double> w(n, 0.0);
  for (;;) {
    std::size_t hits = 0;
    for (auto& v : w) {
      v = coin(rng) ? 1.0 : 0.0;
      hits += v > 0.0;
    }
    if (hits > 0) break;
  }
  return make_distribution(std::move(w));
}

NamedFamily parse_family(const std::string& text) {
  auto colon = text.find(':');
  std::string name = text.substr(0, colon);
  NamedFamily f;
  auto need_param = [&]() {
    if (colon == std::string::npos) throw ValidationError("family '" + name + "' needs a parameter");
    try {
      return std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("bad family parameter in '" + text + "'");
    }
  };
  if (name == "uniform") {
    f.kind = NamedFamily::Kind::Uniform;
  } else if (name == "point_mass") {
    f.kind = NamedFamily::Kind::PointMass;
  } else if (name == "zipf") {
    f.kind = NamedFamily::Kind::Zipf;
    f.param = need_param();
  } else if (name == "geometric") {
    f.kind = NamedFamily::Kind::Geometric;
    f.param = need_param();
  } else {
    throw ValidationError("unknown family '" + name + "'");
  }
  return f;
}

Distribution gen_named(const NamedFamily& family, std::size_t n, std::uint64_t /*seed*/) {
  if (n == 0) throw ValidationError("domain size must be positive");
  std::vector<double> w(n, 0.0);
  switch (family.kind) {
    case NamedFamily::Kind::Uniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case NamedFamily::Kind::PointMass:
      w[0] = 1.0;
      break;
    case NamedFamily::Kind::Zipf:
      if (!(family.param >= 0.0) || !std::isfinite(family.param)) {
        throw ValidationError("zipf exponent must be >= 0");
      }
      for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -family.param);
      break;
    case NamedFamily::Kind::Geometric:
      if (!(family.param > 0.0 && family.param < 1.0)) {
        throw ValidationError("geometric parameter must be in (0,1)");
      }
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = family.param * std::pow(1.0 - family.param, static_cast<double>(i));
      }
      break;
  }
  return make_distribution(std::move(w));
}

Distribution read_distribution(std::istream& in) {
  std::vector<double> dense;
  std::vector<std::pair<std::size_t, double>> sparse;
  std::size_t declared_n = 0;
  bool is_sparse = false;
  bool first = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      auto pos = line.find("n=", start);
      if (pos != std::string::npos) declared_n = std::stoull(line.substr(pos + 2));
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (first) {
      is_sparse = tok.size() == 2;
      first = false;
    }
    try {
      if (is_sparse) {
        if (tok.size() != 2) throw ValidationError("");
        std::size_t pos = 0;
        long long id = std::stoll(tok[0], &pos);
        if (pos != tok[0].size() || id < 1) throw ValidationError("");
        sparse.emplace_back(static_cast<std::size_t>(id), std::stod(tok[1]));
      } else {
        if (tok.size() != 1) throw ValidationError("");
        dense.push_back(std::stod(tok[0]));
      }
    } catch (const std::exception&) {
      throw ValidationError("malformed distribution line " + std::to_string(lineno));
    }
  }
  if (is_sparse) {
    std::size_t n = declared_n;
    for (auto& [id, w] : sparse) n = std::max(n, id);
    if (declared_n != 0 && n > declared_n) throw ValidationError("sparse id exceeds declared n");
    dense.assign(n, 0.0);
    for (auto& [id, w] : sparse) dense[id - 1] += w;
  } else if (declared_n != 0 && declared_n != dense.size()) {
    throw ValidationError("dense line count does not match declared n");
  }
  return make_distribution(std::move(dense));
}

Distribution load_distribution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open distribution file '" + path + "'");
  return read_distribution(in);
}

void write_distribution(std::ostream& out, const Distribution& d) {
  out.precision(17);
  for (double m : d.masses()) out << m << '\n';
}

}  // namespace condest
