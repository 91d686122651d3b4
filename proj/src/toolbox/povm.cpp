#include "herald/toolbox/povm.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

#include "herald/fock/expm.hpp"
#include "herald/toolbox/unitaries.hpp"

namespace herald::toolbox {

using fock::Complex;
using fock::RealVector;
using fock::Sparse;

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Diagonal of the lossy counting element E_n at truncation t.
RealVector pnrd_diag(int n, double gamma, Truncation t) {
  const int d = t.levels();
  RealVector w = RealVector::Zero(d);
  if (gamma == 0.0) {
    w[n] = 1.0;
    return w;
  }
  const double lg = std::log(gamma);
  const double l1g = std::log1p(-gamma);
  for (int k = n; k < d; ++k)
    w[k] = std::exp(log_binomial(k, n) + n * l1g + (k - n) * lg);
  return w;
}

// Ideal multiplexing weights w_r(c) = d!/(d-r)! S(c,r) / d^c for one detector
// count, computed with exact integers and reduced to double only at the end.
// Rows r = 0..detectors, columns c = 0..cutoff.  Cached per (detectors, T):
// the table is pure data, so the cache is transparent.
class MultiplexWeights {
 public:
  static std::shared_ptr<const Eigen::MatrixXd> get(int detectors,
                                                    Truncation t) {
    const std::pair<int, int> key{detectors, t.cutoff};
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto table = std::make_shared<Eigen::MatrixXd>(build(detectors, t));
    std::unique_lock lock(mutex_);
    return cache_.emplace(key, std::move(table)).first->second;
  }

 private:
  static Eigen::MatrixXd build(int d, Truncation t) {
    using boost::multiprecision::cpp_int;
    using Float = boost::multiprecision::cpp_bin_float_50;
    const int cmax = t.cutoff;

    // Stirling numbers of the second kind, S(c,r) = r S(c-1,r) + S(c-1,r-1).
    std::vector<std::vector<cpp_int>> s(cmax + 1,
                                        std::vector<cpp_int>(d + 1, 0));
    s[0][0] = 1;
    for (int c = 1; c <= cmax; ++c)
      for (int r = 1; r <= std::min(c, d); ++r)
        s[c][r] = r * s[c - 1][r] + s[c - 1][r - 1];

    std::vector<cpp_int> falling(d + 1);
    falling[0] = 1;
    for (int r = 1; r <= d; ++r) falling[r] = falling[r - 1] * (d - r + 1);

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d + 1, cmax + 1);
    cpp_int denom = 1;
    for (int c = 0; c <= cmax; ++c) {
      for (int r = 0; r <= std::min(c, d); ++r) {
        const cpp_int num = falling[r] * s[c][r];
        if (num != 0)
          w(r, c) = static_cast<double>(Float(num) / Float(denom));
      }
      denom *= d;
    }
    return w;
  }

  static inline std::shared_mutex mutex_;
  static inline std::map<std::pair<int, int>,
                         std::shared_ptr<const Eigen::MatrixXd>>
      cache_;
};

}  // namespace

PovmElement pnrd_element(int n, double gamma, Truncation t) {
  if (n < 0 || n > t.cutoff)
    throw std::invalid_argument("pnrd_element: outcome outside truncation");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("pnrd_element: gamma outside [0,1)");
  PovmElement e;
  e.label = "pnrd(n=" + std::to_string(n) + ")";
  e.diag = pnrd_diag(n, gamma, t);
  return e;
}

PovmElement bucket_element(int outcome, double gamma, Truncation t) {
  if (outcome != 0 && outcome != 1)
    throw std::invalid_argument("bucket_element: outcome must be 0 or 1");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("bucket_element: gamma outside [0,1)");
  const int d = t.levels();
  PovmElement e;
  e.label = outcome == 0 ? "bucket(off)" : "bucket(on)";
  e.diag = RealVector::Zero(d);
  e.diag[0] = 1.0;  // gamma^0
  for (int n = 1; n < d; ++n) e.diag[n] = gamma == 0.0 ? 0.0 : std::pow(gamma, n);
  if (outcome == 1) e.diag = RealVector::Ones(d) - e.diag;
  return e;
}

PovmElement multiplex_element(int clicks, int detectors, double gamma,
                              Truncation t) {
  if (detectors < 1)
    throw std::invalid_argument("multiplex_element: need detectors >= 1");
  if (clicks < 0 || clicks > detectors)
    throw std::invalid_argument("multiplex_element: clicks outside [0, d]");
  auto w = MultiplexWeights::get(detectors, t);
  const int dim = t.levels();
  PovmElement e;
  e.label = "multiplex(r=" + std::to_string(clicks) + "/" +
            std::to_string(detectors) + ")";
  e.diag = RealVector::Zero(dim);
  if (gamma == 0.0) {
    for (int c = 0; c < dim; ++c) e.diag[c] = (*w)(clicks, c);
    return e;
  }
  // Lossy variant: fold each ideal photon-count weight through the lossy
  // counting element, E_r = sum_c w_r(c) E_c.
  const double lg = std::log(gamma);
  const double l1g = std::log1p(-gamma);
  for (int k = 0; k < dim; ++k) {
    double acc = 0.0;
    for (int c = 0; c <= k; ++c) {
      const double wc = (*w)(clicks, c);
      if (wc == 0.0) continue;
      acc += wc * std::exp(log_binomial(k, c) + c * l1g + (k - c) * lg);
    }
    e.diag[k] = acc;
  }
  return e;
}

PovmElement homodyne_element(double x, double lambda, double bin, Truncation t,
                             const ExpmOptions& opt) {
  if (bin <= 0.0)
    throw std::invalid_argument("homodyne_element: bin width must be > 0");
  const Complex phase = std::exp(Complex(0.0, lambda));
  // G = sqrt2 x e^{i lambda} adag - e^{2 i lambda} adag^2 / 2 acting on |0>.
  Sparse ad = fock::creation(t);
  Sparse g = Sparse(Complex(std::sqrt(2.0) * x) * phase * ad) -
             Sparse(0.5 * phase * phase * Sparse(ad * ad));
  fock::Vector vac = fock::Vector::Zero(t.levels());
  vac[0] = 1.0;
  fock::Vector v = fock::expm_action(g, 1.0, vac, opt);
  v *= std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x) * std::sqrt(bin);

  PovmElement e;
  e.label = "homodyne(x=" + std::to_string(x) + ")";
  e.rank1 = std::move(v);
  return e;
}

std::vector<PovmElement> pnrd_family(double gamma, Truncation t) {
  std::vector<PovmElement> out;
  for (int n = 0; n <= t.cutoff; ++n)
    out.push_back(pnrd_element(n, gamma, t));
  return out;
}

std::vector<PovmElement> bucket_family(double gamma, Truncation t) {
  return {bucket_element(0, gamma, t), bucket_element(1, gamma, t)};
}

std::vector<PovmElement> multiplex_family(int detectors, double gamma,
                                          Truncation t) {
  std::vector<PovmElement> out;
  for (int r = 0; r <= detectors; ++r)
    out.push_back(multiplex_element(r, detectors, gamma, t));
  return out;
}

}  // namespace herald::toolbox
