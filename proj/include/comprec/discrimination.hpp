#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "comprec/coherent.hpp"
#include "comprec/linalg.hpp"

namespace comprec {

struct DiscriminationProblem {
  std::vector<ComplexMatrix> states;
  std::vector<double> priors;

  void validate() const {
    if (states.size() < 2) throw std::invalid_argument("discrimination: need >= 2 states");
    if (priors.size() != states.size())
      throw std::invalid_argument("discrimination: priors/states length mismatch");
    double sum = 0;
    for (double p : priors) {
      if (p < 0) throw std::invalid_argument("discrimination: negative prior");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw std::invalid_argument("discrimination: priors must sum to 1");
    const Eigen::Index dim = states[0].rows();
    for (const auto& rho : states) {
      if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("discrimination: state dimension mismatch");
      require_density_matrix(rho, "discrimination state");
    }
  }
};

// Minimum error for two pure states with overlap gamma.
inline double helstrom_binary_pure(Complex overlap, double p1) {
  if (p1 < 0 || p1 > 1) throw std::invalid_argument("helstrom_binary_pure: bad prior");
  const double g2 = std::norm(overlap);
  if (g2 > 1.0 + 1e-12) throw std::invalid_argument("helstrom_binary_pure: |overlap| > 1");
  const double p2 = 1.0 - p1;
  const double arg = std::max(0.0, 1.0 - 4.0 * p1 * p2 * std::min(1.0, g2));
  return 0.5 * (1.0 - std::sqrt(arg));
}

// Minimum error for two density matrices: (1 - ||p1 rho1 - p2 rho2||_1)/2.
inline double helstrom_binary_mixed(const ComplexMatrix& rho1, const ComplexMatrix& rho2,
                                    double p1) {
  if (p1 < 0 || p1 > 1) throw std::invalid_argument("helstrom_binary_mixed: bad prior");
  require_density_matrix(rho1, "helstrom_binary_mixed rho1");
  require_density_matrix(rho2, "helstrom_binary_mixed rho2");
  return 0.5 * (1.0 - trace_norm(ComplexMatrix(p1 * rho1 - (1.0 - p1) * rho2)));
}

// Optimal measurement for three pure states with Gram
//   [[1, x, x], [x, 1, y], [x, y, 1]]
// and equal priors. The measurement-vector components (a, b, c, d, e) satisfy
//   a^2 + 2b^2 = 1
//   d^2 + c^2 + e^2 = 1
//   a d + b (c + e) = x
//   d^2 + 2 c e = y
//   a b = c d
// and the minimum error is 1 - (a^2 + 2 c^2)/3.
struct IsocelesSolution {
  double a = 0, b = 0, c = 0, d = 0, e = 0;
  double error_prob = 0;
  double max_residual = 0;
};

namespace detail {

struct IsocelesParams {
  double x, y, S;  // S = sqrt(y - 2x^2 + 1)
  std::array<double, 4> abce(double d) const {
    const double T = std::sqrt(std::max(0.0, y - 2 * d * d + 1));
    const double a = (2 * d * x + S * T) / (1 + y);
    const double b = (x - 2 * d * d * x + x * y - d * S * T) / ((1 + y) * T);
    const double c = 0.5 * (T + std::sqrt(1 - y));
    const double e = 0.5 * (T - std::sqrt(1 - y));
    return {a, b, c, e};
  }
  double f(double d) const {
    const auto [a, b, c, e] = abce(d);
    return a * b - c * d;
  }
  IsocelesSolution at(double d) const {
    const auto [a, b, c, e] = abce(d);
    IsocelesSolution s;
    s.a = a; s.b = b; s.c = c; s.d = d; s.e = e;
    s.error_prob = 1.0 - (a * a + 2 * c * c) / 3.0;
    const double r1 = a * a + 2 * b * b - 1;
    const double r2 = d * d + c * c + e * e - 1;
    const double r3 = a * d + b * (c + e) - x;
    const double r4 = d * d + 2 * c * e - y;
    const double r5 = a * b - c * d;
    s.max_residual = std::max({std::abs(r1), std::abs(r2), std::abs(r3), std::abs(r4),
                               std::abs(r5)});
    return s;
  }
};

}  // namespace detail

inline IsocelesSolution isoceles_three_pure(double x, double y) {
  if (!(x >= 0) || !(y >= 0) || x >= 1 || y >= 1)
    throw std::invalid_argument("isoceles_three_pure: need 0 <= x, y < 1");
  if (y - 2 * x * x + 1 < -1e-12)
    throw std::invalid_argument("isoceles_three_pure: Gram not positive semidefinite");
  detail::IsocelesParams P{x, y, std::sqrt(std::max(0.0, y - 2 * x * x + 1))};

  // The consistency condition a b = c d is scanned over the admissible
  // interval and each sign change is bisected down.
  const double dmax = std::sqrt((1 + y) / 2) * (1 - 1e-12);
  constexpr int kScanPoints = 512;
  std::vector<double> roots;
  double prev_d = -dmax, prev_f = P.f(prev_d);
  if (prev_f == 0) roots.push_back(prev_d);
  for (int i = 1; i < kScanPoints; ++i) {
    const double d = -dmax + 2 * dmax * i / (kScanPoints - 1);
    const double fd = P.f(d);
    if (fd == 0) {
      roots.push_back(d);
    } else if (prev_f * fd < 0) {
      double lo = prev_d, hi = d, flo = prev_f;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = P.f(mid);
        if (fm == 0) { lo = hi = mid; break; }
        if (flo * fm < 0) hi = mid; else { lo = mid; flo = fm; }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_d = d;
    prev_f = fd;
  }
  if (roots.empty()) throw std::runtime_error("isoceles_three_pure: no root found");

  std::optional<IsocelesSolution> best;
  for (double d : roots) {
    const IsocelesSolution s = P.at(d);
    if (!best || s.error_prob < best->error_prob) best = s;
  }
  if (best->max_residual > 1e-10)
    throw std::runtime_error("isoceles_three_pure: constraint residual " +
                             std::to_string(best->max_residual));
  return *best;
}

struct PovmResult {
  std::vector<ComplexMatrix> elements;
  double error_prob = 0;
  int iterations = 0;
  bool converged = false;
  double completeness_residual = 0;   // || sum Pi - I ||_max
  double min_element_eigenvalue = 0;  // most negative eigenvalue over elements
  double certificate_hermiticity = 0; // || Gamma - Gamma^dag ||_max, Gamma = sum R_j Pi_j
  double certificate_min_gap = 0;     // min_j lambda_min(Gamma_H - R_j), >= 0 at optimum
  double max_error_increase = 0;      // monotonicity watchdog across iterations
};

// Fixed-point iteration Pi_j <- L R_j Pi_j R_j L with R_j = p_j rho_j and
// L = (sum_k R_k Pi_k R_k)^{-1/2} on its support.
inline PovmResult povm_optimize(const DiscriminationProblem& prob, double tol = 1e-10,
                                int max_iters = 100000) {
  prob.validate();
  const size_t k = prob.states.size();
  const Eigen::Index dim = prob.states[0].rows();
  std::vector<ComplexMatrix> R(k);
  for (size_t j = 0; j < k; ++j) R[j] = prob.priors[j] * prob.states[j];

  PovmResult res;
  res.elements.assign(k, ComplexMatrix::Identity(dim, dim) / static_cast<double>(k));
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);

  auto error_of = [&](const std::vector<ComplexMatrix>& pi) {
    double succ = 0;
    for (size_t j = 0; j < k; ++j) succ += (R[j] * pi[j]).trace().real();
    return 1.0 - succ;
  };

  double err = error_of(res.elements);
  // The error stalls well before the elements settle, so convergence is
  // declared on the error but the loop keeps running (within a bounded extra
  // budget) until the element movement dies down too; that is what tightens
  // the stationarity certificates below.
  int extra = 0;
  const int extra_cap = 20000;
  for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
    ComplexMatrix lam = ComplexMatrix::Zero(dim, dim);
    for (size_t j = 0; j < k; ++j) lam += R[j] * res.elements[j] * R[j];
    lam = (lam + lam.adjoint()).eval() / 2.0;
    const ComplexMatrix l = herm_sqrt_inv(lam, true);
    std::vector<ComplexMatrix> next(k);
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (size_t j = 0; j < k; ++j) {
      next[j] = l * R[j] * res.elements[j] * R[j] * l;
      next[j] = (next[j] + next[j].adjoint()).eval() / 2.0;
      sum += next[j];
    }
    // keep completeness on the full space: park the off-support identity evenly
    const ComplexMatrix gap = (id - sum) / static_cast<double>(k);
    for (size_t j = 0; j < k; ++j) next[j] += gap;
    const double next_err = error_of(next);
    res.max_error_increase = std::max(res.max_error_increase, next_err - err);
    double movement = 0;
    for (size_t j = 0; j < k; ++j)
      movement = std::max(movement, max_abs(ComplexMatrix(next[j] - res.elements[j])));
    res.elements = std::move(next);
    const bool err_settled = std::abs(next_err - err) < tol;
    err = next_err;
    if (err_settled) {
      res.converged = true;
      if (movement < 1e-11 || ++extra > extra_cap) {
        ++res.iterations;
        break;
      }
    }
  }

  // Project the iterate back onto the exact POVM set before reporting:
  // Hermitize, drop negative roundoff modes, restore completeness by a
  // symmetric normalization. Every reported number below describes the
  // elements actually returned.
  {
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (size_t j = 0; j < k; ++j) {
      const EighResult es = eigh(ComplexMatrix((res.elements[j] + res.elements[j].adjoint()) / 2.0));
      ComplexMatrix clipped = ComplexMatrix::Zero(dim, dim);
      for (Eigen::Index i = 0; i < es.values.size(); ++i)
        if (es.values(i) > 0)
          clipped += es.values(i) * es.vectors.col(i) * es.vectors.col(i).adjoint();
      res.elements[j] = clipped;
      total += clipped;
    }
    const ComplexMatrix t = herm_sqrt_inv(total, true);
    const ComplexMatrix perp = id - t * total * t;
    for (size_t j = 0; j < k; ++j) {
      res.elements[j] = t * res.elements[j] * t + perp / static_cast<double>(k);
      res.elements[j] = ((res.elements[j] + res.elements[j].adjoint()) / 2.0).eval();
    }
  }
  res.error_prob = error_of(res.elements);

  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix gamma = ComplexMatrix::Zero(dim, dim);
  res.min_element_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < k; ++j) {
    sum += res.elements[j];
    gamma += R[j] * res.elements[j];
    res.min_element_eigenvalue =
        std::min(res.min_element_eigenvalue, min_hermitian_eigenvalue(res.elements[j]));
  }
  res.completeness_residual = max_abs(ComplexMatrix(sum - id));
  res.certificate_hermiticity = hermiticity_residual(gamma);
  const ComplexMatrix gamma_h = (gamma + gamma.adjoint()) / 2.0;
  res.certificate_min_gap = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < k; ++j)
    res.certificate_min_gap =
        std::min(res.certificate_min_gap, min_hermitian_eigenvalue(ComplexMatrix(gamma_h - R[j])));
  return res;
}

// Standard normal upper tail.
inline double gauss_q(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Maximum-likelihood homodyne baseline for real-amplitude alphabets.
// Quadrature convention x = (a + a^dag)/sqrt(2): outcome ~ N(sqrt(2) alpha_j, 1/2).
// Decision regions are intervals; with equal priors the boundaries are the
// midpoints between neighbouring means.
inline double homodyne_ml_error(const CoherentEnsemble& ens) {
  const size_t k = ens.size();
  if (k != 2 && k != 3)
    throw std::invalid_argument("homodyne_ml_error: BPSK or 3ASK alphabet required");
  std::vector<std::pair<double, double>> mp(k);  // (mean, prior), sorted by mean
  for (size_t j = 0; j < k; ++j) {
    if (std::abs(ens.amplitudes[j].imag()) > 0)
      throw std::invalid_argument("homodyne_ml_error: real amplitudes required");
    mp[j] = {std::sqrt(2.0) * ens.amplitudes[j].real(), ens.priors[j]};
  }
  std::sort(mp.begin(), mp.end());
  const double sigma = std::sqrt(0.5);
  const double s2 = 0.5;

  auto boundary = [&](size_t i, size_t j) {
    // MAP crossing point between hypotheses i < j (means ascending)
    return 0.5 * (mp[i].first + mp[j].first) +
           s2 * std::log(mp[i].second / mp[j].second) / (mp[j].first - mp[i].first);
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> region(k);  // decision interval per hypothesis
  if (k == 2) {
    const double b = boundary(0, 1);
    region[0] = {-inf, b};
    region[1] = {b, inf};
  } else {
    double b01 = boundary(0, 1), b12 = boundary(1, 2);
    if (b01 <= b12) {
      region[0] = {-inf, b01};
      region[1] = {b01, b12};
      region[2] = {b12, inf};
    } else {
      // middle hypothesis never decided
      const double b02 = boundary(0, 2);
      region[0] = {-inf, b02};
      region[1] = {0, 0};
      region[2] = {b02, inf};
    }
  }
  double err = 0;
  for (size_t j = 0; j < k; ++j) {
    const auto [lo, hi] = region[j];
    const double mu = mp[j].first;
    double inside = 1.0;
    if (lo == hi) inside = 0.0;
    else inside = gauss_q((lo - mu) / sigma) - gauss_q((hi - mu) / sigma);
    err += mp[j].second * (1.0 - inside);
  }
  return err;
}

// Pure states with prescribed Gram, embedded in K dimensions (columns).
inline std::vector<ComplexVector> states_from_gram(const ComplexMatrix& gram) {
  if (hermiticity_residual(gram) > 1e-10)
    throw std::invalid_argument("states_from_gram: Gram not Hermitian");
  const EighResult es = eigh(ComplexMatrix((gram + gram.adjoint()) / 2.0));
  const Eigen::Index k = gram.rows();
  ComplexMatrix m = ComplexMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double lam = es.values(i);
    if (lam < kPsdFloor)
      throw std::domain_error("states_from_gram: Gram has negative eigenvalue");
    if (lam < 0) {
      warn("states_from_gram: clipping eigenvalue to 0");
      lam = 0;
    }
    m.row(i) = std::sqrt(lam) * es.vectors.col(i).adjoint();
  }
  std::vector<ComplexVector> out(k);
  for (Eigen::Index j = 0; j < k; ++j) out[j] = m.col(j);
  return out;
}

// Quantum-optimal error for the coherent alphabet itself.
inline double helstrom_bound(const CoherentEnsemble& ens) {
  const size_t k = ens.size();
  if (k == 2)
    return helstrom_binary_pure(coherent_overlap(ens.amplitudes[0], ens.amplitudes[1]),
                                ens.priors[0]);
  const ComplexMatrix g = gram_matrix(ens);
  bool equal_priors = true;
  for (double p : ens.priors) equal_priors &= std::abs(p - 1.0 / k) <= 1e-12;
  if (k == 3 && equal_priors && max_abs(ComplexMatrix(g.imag().cast<Complex>())) <= 1e-12) {
    // vertex hypothesis v: equal overlap x with both others
    for (int v = 0; v < 3; ++v) {
      const int o1 = (v + 1) % 3, o2 = (v + 2) % 3;
      const double x1 = std::abs(g(v, o1)), x2 = std::abs(g(v, o2));
      if (std::abs(x1 - x2) <= 1e-12)
        return isoceles_three_pure(x1, std::abs(g(o1, o2))).error_prob;
    }
  }
  // general fallback: embed the Gram and optimize the measurement
  const auto states = states_from_gram(g);
  DiscriminationProblem prob;
  for (const auto& s : states) prob.states.push_back(s * s.adjoint());
  prob.priors = ens.priors;
  const PovmResult r = povm_optimize(prob, 1e-12);
  if (!r.converged) throw std::runtime_error("helstrom_bound: measurement search failed");
  return r.error_prob;
}

// Projectors of the equal-weight binary Helstrom measurement for (rho_minus, rho_plus):
// plus on the nonnegative eigenspace of rho_plus - rho_minus.
inline std::array<ComplexMatrix, 2> binary_helstrom_projectors(const ComplexMatrix& rho_minus,
                                                               const ComplexMatrix& rho_plus) {
  const EighResult es = eigh(ComplexMatrix((rho_plus - rho_minus + (rho_plus - rho_minus).adjoint()) / 2.0));
  const Eigen::Index dim = rho_plus.rows();
  ComplexMatrix plus = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    if (es.values(i) >= 0) plus += es.vectors.col(i) * es.vectors.col(i).adjoint();
  return {ComplexMatrix(ComplexMatrix::Identity(dim, dim) - plus), plus};
}

// Classical baseline for codeword discrimination: each mode is measured
// independently with the binary Helstrom projectors, then the codeword is
// chosen by maximum likelihood over the outcome tuple (brute force).
// mode_states[m] = {rho for sign -1, rho for sign +1}.
inline double product_measurement_baseline(
    const std::vector<std::array<ComplexMatrix, 2>>& mode_states,
    const std::vector<std::vector<int>>& codewords, const std::vector<double>& priors) {
  const size_t modes = mode_states.size();
  const size_t k = codewords.size();
  if (modes == 0 || modes > 16) throw std::invalid_argument("baseline: bad mode count");
  if (k < 2 || priors.size() != k) throw std::invalid_argument("baseline: bad codebook");
  for (const auto& w : codewords) {
    if (w.size() != modes) throw std::invalid_argument("baseline: codeword length mismatch");
    for (int s : w)
      if (s != -1 && s != 1) throw std::invalid_argument("baseline: codeword entries must be +-1");
  }
  std::vector<std::array<ComplexMatrix, 2>> povms(modes);
  for (size_t m = 0; m < modes; ++m)
    povms[m] = binary_helstrom_projectors(mode_states[m][0], mode_states[m][1]);

  // p[m][s][o]: P(outcome o | sign s) in mode m
  std::vector<std::array<std::array<double, 2>, 2>> p(modes);
  for (size_t m = 0; m < modes; ++m)
    for (int s = 0; s < 2; ++s)
      for (int o = 0; o < 2; ++o)
        p[m][s][o] = std::max(0.0, (mode_states[m][s] * povms[m][o]).trace().real());

  double success = 0;
  for (size_t t = 0; t < (size_t{1} << modes); ++t) {
    double best = 0;
    for (size_t w = 0; w < k; ++w) {
      double like = priors[w];
      for (size_t m = 0; m < modes; ++m) {
        const int s = codewords[w][m] == 1 ? 1 : 0;
        like *= p[m][s][(t >> m) & 1];
      }
      best = std::max(best, like);
    }
    success += best;
  }
  return 1.0 - success;
}

}  // namespace comprec
