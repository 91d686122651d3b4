#include "herald/fitness/bmse.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace herald::fitness {
namespace {

constexpr double kTrimTail = 1e-13;   // probe amplitude tail dropped up front
constexpr double kMassTol = 1e-6;     // enumeration must conserve this much
constexpr int kMaxGridNodes = 4000;   // doubling safety stop
constexpr int kPhaseScan = 17;        // coarse scan before golden section
constexpr double kGolden = 0.6180339887498949;

using Eigen::ArrayXd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

// exp(theta (a1 a2^dag - a1^dag a2)) at theta = pi/4 (50:50), restricted to
// the total-photon sector s with first-mode occupation in [mlo, mhi].  The
// generator is tridiagonal anti-Hermitian, so i G is Hermitian and the
// exponential comes from one small eigendecomposition.
MatrixXcd sector_splitter(int s, int mlo, int mhi) {
  const int n = mhi - mlo + 1;
  const double theta = M_PI / 4.0;
  const fock::Complex im(0.0, 1.0);
  MatrixXcd h = MatrixXcd::Zero(n, n);  // i G
  for (int t = 0; t + 1 < n; ++t) {
    const int m = mlo + t + 1;  // column m couples to row m - 1
    const double g = theta * std::sqrt(double(m) * double(s - m + 1));
    h(t, t + 1) = im * g;
    h(t + 1, t) = -im * g;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  const ArrayXd lam = es.eigenvalues().array();
  VectorXcd phase(n);
  for (int t = 0; t < n; ++t) phase[t] = std::exp(-im * lam[t]);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

// Trimmed copy of a normalized single-mode probe: drops the amplitude tail
// below kTrimTail and renormalizes.
VectorXcd trim_probe(const fock::KetState& psi) {
  if (psi.n_modes != 1)
    throw std::invalid_argument("bmse: probe must be a single-mode state");
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("bmse: probe must be normalized");
  int d = static_cast<int>(psi.amplitudes.size());
  double acc = 0.0;
  while (d > 1 && acc + std::norm(psi.amplitudes[d - 1]) <= kTrimTail) {
    acc += std::norm(psi.amplitudes[d - 1]);
    --d;
  }
  VectorXcd c = psi.amplitudes.head(d);
  c /= c.norm();
  return c;
}

// Static tables of the two-copy scheme: per-sector pair amplitudes and
// balanced-splitter blocks, independent of theta and the phase correction.
struct SchemeTables {
  int d = 1;                         // trimmed probe levels
  std::vector<VectorXcd> pair;       // sector s: a[m] = c_m c_{s-m}, len s+1
  std::vector<MatrixXcd> splitter;   // sector s: exp(G_s), (s+1)x(s+1)
  std::vector<int> rows_for_sector;  // first outcome row of each sector

  int n_outcomes() const { return rows_for_sector.back(); }
};

SchemeTables build_tables(const VectorXcd& c) {
  SchemeTables t;
  t.d = static_cast<int>(c.size());
  const int s_max = 2 * (t.d - 1);
  t.pair.resize(s_max + 1);
  t.splitter.resize(s_max + 1);
  t.rows_for_sector.assign(s_max + 2, 0);
  for (int s = 0; s <= s_max; ++s) {
    VectorXcd a = VectorXcd::Zero(s + 1);
    for (int m = std::max(0, s - (t.d - 1)); m <= std::min(s, t.d - 1); ++m)
      a[m] = c[m] * c[s - m];
    t.pair[s] = std::move(a);
    if (t.pair[s].squaredNorm() > 0.0) t.splitter[s] = sector_splitter(s, 0, s);
    t.rows_for_sector[s + 1] = t.rows_for_sector[s] + (s + 1);
  }
  return t;
}

// Per-shot outcome probabilities P(row, node) for the scheme at phase
// correction phi; rows enumerate (s, m1) pairs per rows_for_sector.
MatrixXd shot_probabilities(const SchemeTables& t, const ArrayXd& theta,
                            double phi) {
  const int k = static_cast<int>(theta.size());
  MatrixXd p = MatrixXd::Zero(t.n_outcomes(), k);
  const fock::Complex im(0.0, 1.0);
  const int s_max = static_cast<int>(t.pair.size()) - 1;
  for (int s = 0; s <= s_max; ++s) {
    if (t.pair[s].squaredNorm() == 0.0) continue;
    VectorXcd rotated(s + 1), out(s + 1);
    for (int node = 0; node < k; ++node) {
      for (int m = 0; m <= s; ++m) {
        const double arg =
            -0.5 * (2.0 * m - s) * theta[node] - double(s - m) * phi;
        rotated[m] = t.pair[s][m] * std::exp(im * arg);
      }
      out = t.splitter[s] * rotated;
      for (int m = 0; m <= s; ++m)
        p(t.rows_for_sector[s] + m, node) = std::norm(out[m]);
    }
  }
  return p;
}

// Keeps the heaviest rows (by prior-averaged probability) until at most
// `tail` mass remains, then appends one residual row so columns sum to 1.
MatrixXd filter_outcomes(const MatrixXd& p, const ArrayXd& what, double tail,
                         int* kept_out) {
  const int k = static_cast<int>(p.cols());
  const ArrayXd avg = (p * what.matrix()).array();
  std::vector<int> order(p.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return avg[a] > avg[b]; });
  double cum = 0.0;
  int kept = 0;
  while (kept < static_cast<int>(order.size()) && cum < 1.0 - tail)
    cum += avg[order[kept++]];
  MatrixXd out(kept + 1, k);
  ArrayXd kept_sum = ArrayXd::Zero(k);
  for (int r = 0; r < kept; ++r) {
    out.row(r) = p.row(order[r]);
    kept_sum += p.row(order[r]).transpose().array();
  }
  out.row(kept) = (1.0 - kept_sum).max(0.0).matrix().transpose();
  if (kept_out) *kept_out = kept;
  return out;
}

// Optional posterior capture for diagnostics and invariants.
struct GridCollector {
  double width = 0.0;
  std::vector<double> outcome_probability;
  std::vector<ArrayXd> posterior;  // densities over the nodes
  std::int64_t cap = 20000;

  void add(double p_m, const ArrayXd& likelihood, double s0) {
    if (static_cast<std::int64_t>(posterior.size()) >= cap) return;
    outcome_probability.push_back(p_m);
    posterior.push_back(likelihood / (width * s0));
  }
};

struct PosteriorAccumulator {
  const ArrayXd& what;
  const ArrayXd& th;
  const ArrayXd& th2;
  double total = 0.0;
  double mass = 0.0;
  std::int64_t rows = 0;
  GridCollector* collect = nullptr;

  // One outcome class with likelihood `lik` over the nodes and combinatorial
  // weight `coeff` (1 for plain outcomes).
  void add(const ArrayXd& lik, double coeff) {
    const double s0 = (what * lik).sum();
    if (!(s0 > 0.0) || !(coeff > 0.0)) return;
    const double s1 = (what * lik * th).sum();
    const double s2 = (what * lik * th2).sum();
    total += coeff * (s2 - s1 * s1 / s0);
    mass += coeff * s0;
    ++rows;
    if (collect) collect->add(coeff * s0, lik, s0);
  }
};

// Exact expected posterior variance for mu independent shots drawn from the
// rows of P: multisets of rows are enumerated depth-first with shared
// partial likelihood products and multinomial weights.
void exact_bmse(const MatrixXd& p, int mu, PosteriorAccumulator& acc) {
  const int n_rows = static_cast<int>(p.rows());
  const int k = static_cast<int>(p.cols());
  if (mu == 1) {
    for (int r = 0; r < n_rows; ++r)
      acc.add(p.row(r).transpose().array(), 1.0);
    return;
  }
  const double lg_mu = std::lgamma(mu + 1.0);
  std::vector<ArrayXd> scratch(n_rows, ArrayXd(k));  // fixed: no reallocation
  std::function<void(int, int, double, const ArrayXd&)> recurse =
      [&](int row, int left, double log_coeff, const ArrayXd& prod) {
        if (left == 0) {
          acc.add(prod, std::exp(lg_mu + log_coeff));
          return;
        }
        if (row == n_rows - 1) {
          ArrayXd leaf = prod;
          for (int c = 0; c < left; ++c)
            leaf *= p.row(row).transpose().array();
          acc.add(leaf,
                  std::exp(lg_mu + log_coeff - std::lgamma(left + 1.0)));
          return;
        }
        recurse(row + 1, left, log_coeff, prod);
        ArrayXd& buf = scratch[row];
        buf = prod;
        for (int c = 1; c <= left; ++c) {
          buf *= p.row(row).transpose().array();
          recurse(row + 1, left - c, log_coeff - std::lgamma(c + 1.0), buf);
        }
      };
  recurse(0, mu, 0.0, ArrayXd::Ones(k));
}

// Monte Carlo estimate over outcome sequences: nodes are drawn from the
// quadrature measure, shots from the per-node outcome columns; sequences
// collapse to multisets before the posterior is evaluated.
double mc_bmse(const MatrixXd& p, int mu, const ArrayXd& what,
               const ArrayXd& th, const ArrayXd& th2, std::int64_t n_seq,
               std::uint64_t seed, double* stderr_out,
               GridCollector* collect) {
  const int n_rows = static_cast<int>(p.rows());
  const int k = static_cast<int>(p.cols());
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  ArrayXd node_cdf(k);
  double cum = 0.0;
  for (int i = 0; i < k; ++i) node_cdf[i] = (cum += what[i]);
  MatrixXd col_cdf(n_rows, k);
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int r = 0; r < n_rows; ++r) col_cdf(r, i) = (s += p(r, i));
  }

  std::map<std::vector<std::pair<int, int>>, std::int64_t> histogram;
  std::vector<int> counts(n_rows);
  for (std::int64_t it = 0; it < n_seq; ++it) {
    const double un = uniform() * node_cdf[k - 1];
    const int node = static_cast<int>(
        std::lower_bound(node_cdf.data(), node_cdf.data() + k, un) -
        node_cdf.data());
    std::fill(counts.begin(), counts.end(), 0);
    for (int t = 0; t < mu; ++t) {
      const double u = uniform() * col_cdf(n_rows - 1, node);
      int r = 0;
      while (r < n_rows - 1 && col_cdf(r, node) < u) ++r;
      ++counts[r];
    }
    std::vector<std::pair<int, int>> key;
    for (int r = 0; r < n_rows; ++r)
      if (counts[r] > 0) key.emplace_back(r, counts[r]);
    ++histogram[key];
  }

  double mean = 0.0, mean_sq = 0.0;
  for (const auto& [key, hits] : histogram) {
    ArrayXd lik = ArrayXd::Ones(k);
    for (const auto& [row, count] : key)
      for (int t = 0; t < count; ++t) lik *= p.row(row).transpose().array();
    const double s0 = (what * lik).sum();
    if (!(s0 > 0.0)) continue;
    const double s1 = (what * lik * th).sum();
    const double s2 = (what * lik * th2).sum();
    const double var = s2 / s0 - (s1 / s0) * (s1 / s0);
    const double frac = static_cast<double>(hits) / n_seq;
    mean += frac * var;
    mean_sq += frac * var * var;
    if (collect) collect->add(frac, lik, s0);
  }
  if (stderr_out)
    *stderr_out = std::sqrt(std::max(0.0, mean_sq - mean * mean) /
                            static_cast<double>(n_seq));
  return mean;
}

struct GridArrays {
  ArrayXd nodes, weights, what, th2;
};

GridArrays make_grid(const PriorSpec& prior, int n) {
  const QuadratureRule rule = gauss_legendre(n, prior.lo(), prior.hi());
  GridArrays g;
  g.nodes = rule.nodes.array();
  g.weights = rule.weights.array();
  g.what = g.weights / prior.width;  // uniform prior density folded in
  g.th2 = g.nodes * g.nodes;
  return g;
}

// One full fixed-POVM evaluation at a given grid and phase correction.
double fixed_bmse_at(const SchemeTables& tables, const GridArrays& grid,
                     double phi, int mu, const BmseOptions& opt, bool exact,
                     std::int64_t mc_sequences, std::int64_t* outcomes_out,
                     double* stderr_out, GridCollector* collect) {
  const MatrixXd full = shot_probabilities(tables, grid.nodes, phi);
  int kept = 0;
  const MatrixXd p = filter_outcomes(full, grid.what, opt.outcome_tail, &kept);
  if (exact) {
    PosteriorAccumulator acc{grid.what, grid.nodes, grid.th2};
    acc.collect = collect;
    exact_bmse(p, mu, acc);
    if (std::abs(acc.mass - 1.0) > kMassTol)
      throw std::runtime_error(
          "bmse: outcome enumeration lost probability mass; grid too coarse");
    if (outcomes_out) *outcomes_out = acc.rows;
    if (stderr_out) *stderr_out = 0.0;
    return std::max(0.0, acc.total);
  }
  if (outcomes_out) *outcomes_out = mc_sequences;
  return std::max(0.0, mc_bmse(p, mu, grid.what, grid.nodes, grid.th2,
                               mc_sequences, opt.mc_seed, stderr_out,
                               collect));
}

void attach_grid(BmseResult& result, const GridArrays& grid,
                 GridCollector& collector) {
  PosteriorGrid pg;
  pg.nodes = grid.nodes.matrix();
  pg.weights = grid.weights.matrix();
  const auto n_rows =
      static_cast<std::int64_t>(collector.outcome_probability.size());
  pg.outcome_probabilities.resize(n_rows);
  for (std::int64_t r = 0; r < n_rows; ++r)
    pg.outcome_probabilities[r] = collector.outcome_probability[r];
  pg.posteriors.resize(n_rows, grid.nodes.size());
  for (std::int64_t r = 0; r < n_rows; ++r)
    pg.posteriors.row(r) = collector.posterior[r].matrix().transpose();
  result.grid = std::move(pg);
}

}  // namespace

double improvement_factor(double eps_ref, double eps) {
  if (!(eps_ref > 0.0))
    throw std::invalid_argument(
        "improvement_factor: reference error must be positive");
  return (eps_ref - eps) / eps_ref;
}

fock::KetState apply_balanced_splitter(const fock::KetState& psi, int mode_i,
                                       int mode_j) {
  if (mode_i < 0 || mode_j < 0 || mode_i >= psi.n_modes ||
      mode_j >= psi.n_modes || mode_i == mode_j)
    throw std::invalid_argument("apply_balanced_splitter: bad mode pair");
  const int cutoff = psi.truncation.cutoff;
  const auto ix = psi.indexer();
  const std::int64_t stride_i =
      fock::pow_i64(ix.levels, psi.n_modes - 1 - mode_i);
  const std::int64_t stride_j =
      fock::pow_i64(ix.levels, psi.n_modes - 1 - mode_j);

  std::vector<MatrixXcd> blocks(2 * cutoff + 1);
  for (int s = 0; s <= 2 * cutoff; ++s)
    blocks[s] =
        sector_splitter(s, std::max(0, s - cutoff), std::min(s, cutoff));

  fock::KetState out = psi;
  VectorXcd v, y;
  for (std::int64_t base = 0; base < ix.dim(); ++base) {
    if (ix.digit(base, mode_i) != 0 || ix.digit(base, mode_j) != 0) continue;
    for (int s = 0; s <= 2 * cutoff; ++s) {
      const int mlo = std::max(0, s - cutoff), mhi = std::min(s, cutoff);
      v.resize(mhi - mlo + 1);
      for (int m = mlo; m <= mhi; ++m)
        v[m - mlo] = psi.amplitudes[base + m * stride_i + (s - m) * stride_j];
      y = blocks[s] * v;
      for (int m = mlo; m <= mhi; ++m)
        out.amplitudes[base + m * stride_i + (s - m) * stride_j] = y[m - mlo];
    }
  }
  return out;
}

BmseResult bmse_fixed_povm(const fock::KetState& probe, int mu,
                           const PriorSpec& prior,
                           const BmseOptions& options) {
  if (mu < 1) throw std::invalid_argument("bmse: mu must be >= 1");
  if (!(prior.width > 0.0))
    throw std::invalid_argument("bmse: prior width must be positive");
  const VectorXcd c = trim_probe(probe);
  const SchemeTables tables = build_tables(c);

  BmseResult result;
  result.prior_variance = prior.variance();

  // Mode decision from the initial grid at phi = 0: exact enumeration only
  // when kept^mu stays within the cap.
  GridArrays grid = make_grid(prior, std::max(3, options.grid_nodes));
  {
    int kept = 0;
    const MatrixXd full = shot_probabilities(tables, grid.nodes, 0.0);
    filter_outcomes(full, grid.what, options.outcome_tail, &kept);
    result.monte_carlo =
        mu * std::log(double(std::max(kept, 1))) > std::log(options.enum_cap);
  }
  const bool exact = !result.monte_carlo;
  const std::int64_t n_seq =
      std::max<std::int64_t>(options.mc_sequences, 1000);

  // Phase correction: coarse scan plus golden-section refinement, on reduced
  // settings (small grid, reduced sample count) for speed; deterministic.
  double phi = options.fixed_phase;
  if (options.optimize_phase) {
    const GridArrays opt_grid =
        make_grid(prior, std::min(std::max(3, options.grid_nodes), 21));
    const std::int64_t opt_seq = std::max<std::int64_t>(10000, n_seq / 10);
    auto objective = [&](double angle) {
      return fixed_bmse_at(tables, opt_grid, angle, mu, options, exact,
                           opt_seq, nullptr, nullptr, nullptr);
    };
    const double step = 2.0 * M_PI / kPhaseScan;
    int best = 0;
    double best_val = objective(0.0);
    for (int j = 1; j < kPhaseScan; ++j) {
      const double val = objective(j * step);
      if (val < best_val) {
        best_val = val;
        best = j;
      }
    }
    double a = (best - 1) * step, b = (best + 1) * step;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-6) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = objective(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = objective(x2);
      }
    }
    phi = 0.5 * (a + b);
    if (phi < 0.0) phi += 2.0 * M_PI;
    if (phi >= 2.0 * M_PI) phi -= 2.0 * M_PI;
  }
  result.phase_correction = phi;

  // Grid refinement: double until the deterministic value stabilizes.  The
  // criterion value is the exact BMSE (at mu for exact mode, mu = 1 for
  // Monte Carlo mode, whose sampling noise would swamp the grid signal).
  int n_nodes = std::max(3, options.grid_nodes);
  const int crit_mu = exact ? mu : 1;
  double value = fixed_bmse_at(tables, grid, phi, crit_mu, options, true,
                               n_seq, nullptr, nullptr, nullptr);
  while (true) {
    const int finer = 2 * n_nodes + 1;
    if (finer > kMaxGridNodes)
      throw std::runtime_error("bmse: posterior grid did not converge");
    const GridArrays refined = make_grid(prior, finer);
    const double refined_value = fixed_bmse_at(
        tables, refined, phi, crit_mu, options, true, n_seq, nullptr, nullptr,
        nullptr);
    const bool done = std::abs(refined_value - value) <= options.grid_tol;
    n_nodes = finer;
    grid = refined;
    value = refined_value;
    if (done) break;
  }
  result.grid_nodes = n_nodes;

  GridCollector collector;
  collector.width = prior.width;
  GridCollector* collect = options.keep_grid ? &collector : nullptr;
  result.bmse = fixed_bmse_at(tables, grid, phi, mu, options, exact, n_seq,
                              &result.outcomes_kept, &result.mc_stderr,
                              collect);
  if (options.keep_grid) attach_grid(result, grid, collector);
  return result;
}

BmseResult bmse_single_shot_optimal(const fock::KetState& probe,
                                    const PriorSpec& prior,
                                    const BmseOptions& options) {
  if (!(prior.width > 0.0))
    throw std::invalid_argument("bmse: prior width must be positive");
  const VectorXcd c = trim_probe(probe);
  const int d = static_cast<int>(c.size());

  BmseResult result;
  result.prior_variance = prior.variance();

  // All encoded states live in span{|psi_theta>} over the grid nodes; the
  // Gram matrix gives an orthonormal basis of that span, so every
  // eigenproblem stays at the grid size rather than d^2.
  struct Bound {
    double value = 0.0;
    MatrixXd povm;  // rows: S-eigenbasis outcomes + residual, cols: nodes
    std::int64_t outcomes = 0;
  };
  auto bound_at = [&](const GridArrays& g) {
    const int k = static_cast<int>(g.nodes.size());
    MatrixXcd psi(d * d, k);
    const fock::Complex im(0.0, 1.0);
    for (int node = 0; node < k; ++node)
      for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
          psi(n1 * d + n2, node) =
              c[n1] * c[n2] *
              std::exp(-im * (0.5 * (n1 - n2) * g.nodes[node]));
    const MatrixXcd gram = psi.adjoint() * psi;

    Eigen::SelfAdjointEigenSolver<MatrixXcd> ges(gram);
    const ArrayXd gev = ges.eigenvalues().array();
    const double gmax = gev.maxCoeff();
    std::vector<int> span;
    for (int i = 0; i < k; ++i)
      if (gev[i] > 1e-14 * gmax) span.push_back(i);
    const int r = static_cast<int>(span.size());
    MatrixXcd basis(k, r);
    for (int t = 0; t < r; ++t)
      basis.col(t) = ges.eigenvectors().col(span[t]) / std::sqrt(gev[span[t]]);

    // rho and rho_bar in the orthonormal subspace basis Q = psi * basis.
    const MatrixXcd gw = gram * g.what.matrix().asDiagonal() * gram;
    const MatrixXcd gwt =
        gram * (g.what * g.nodes).matrix().asDiagonal() * gram;
    const MatrixXcd rho_q = basis.adjoint() * gw * basis;
    const MatrixXcd rbar_q = basis.adjoint() * gwt * basis;

    Eigen::SelfAdjointEigenSolver<MatrixXcd> res(rho_q);
    const ArrayXd q = res.eigenvalues().array();
    const double qmax = q.maxCoeff();
    std::vector<int> kept;
    for (int i = 0; i < r; ++i)
      if (q[i] > options.eig_cutoff * qmax) kept.push_back(i);
    const int nk = static_cast<int>(kept.size());

    // S rho + rho S = 2 rho_bar in rho's eigenbasis; the bound drops the
    // rank-deficient directions (they carry no probability).
    const MatrixXcd rbar_e =
        res.eigenvectors().adjoint() * rbar_q * res.eigenvectors();
    MatrixXcd s_op(nk, nk);
    double trace_term = 0.0;
    for (int a = 0; a < nk; ++a)
      for (int b = 0; b < nk; ++b) {
        const double denom = q[kept[a]] + q[kept[b]];
        s_op(a, b) = 2.0 * rbar_e(kept[a], kept[b]) / denom;
        trace_term += 2.0 * std::norm(rbar_e(kept[a], kept[b])) / denom;
      }

    Bound out;
    out.value = (g.what * g.th2).sum() - trace_term;
    out.outcomes = nk + 1;

    // Response of the projective measurement onto S's eigenbasis, for the
    // saturation cross-check: |<s_j|psi_theta>|^2 via subspace coordinates.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> ses(s_op);
    MatrixXcd v_kept(r, nk);
    for (int a = 0; a < nk; ++a)
      v_kept.col(a) = res.eigenvectors().col(kept[a]);
    const MatrixXcd amp = ses.eigenvectors().adjoint() * v_kept.adjoint() *
                          basis.adjoint() * gram;
    out.povm.resize(nk + 1, k);
    for (int j = 0; j < nk; ++j)
      for (int node = 0; node < k; ++node)
        out.povm(j, node) = std::norm(amp(j, node));
    out.povm.row(nk) = (1.0 - out.povm.topRows(nk)
                                  .colwise()
                                  .sum()
                                  .transpose()
                                  .array())
                           .max(0.0)
                           .matrix()
                           .transpose();
    return out;
  };

  int n_nodes = std::max(3, options.grid_nodes);
  GridArrays grid = make_grid(prior, n_nodes);
  Bound bound = bound_at(grid);
  while (true) {
    const int finer = 2 * n_nodes + 1;
    if (finer > kMaxGridNodes)
      throw std::runtime_error("bmse: posterior grid did not converge");
    const GridArrays refined = make_grid(prior, finer);
    Bound refined_bound = bound_at(refined);
    const bool done =
        std::abs(refined_bound.value - bound.value) <= options.grid_tol;
    n_nodes = finer;
    grid = refined;
    bound = std::move(refined_bound);
    if (done) break;
  }

  GridCollector collector;
  collector.width = prior.width;
  GridCollector* collect = options.keep_grid ? &collector : nullptr;
  PosteriorAccumulator acc{grid.what, grid.nodes, grid.th2};
  acc.collect = collect;
  exact_bmse(bound.povm, 1, acc);
  if (std::abs(acc.mass - 1.0) > kMassTol)
    throw std::runtime_error("bmse: optimal-POVM response lost mass");

  result.bmse = bound.value;
  result.grid_nodes = n_nodes;
  result.outcomes_kept = bound.outcomes;
  result.saturation_defect = acc.total - bound.value;
  if (options.keep_grid) attach_grid(result, grid, collector);
  return result;
}

}  // namespace herald::fitness
