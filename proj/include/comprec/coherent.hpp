#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "comprec/linalg.hpp"

namespace comprec {

// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a)*b)
inline Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

struct CoherentEnsemble {
  std::vector<Complex> amplitudes;
  std::vector<double> priors;

  CoherentEnsemble(std::vector<Complex> amps, std::vector<double> ps)
      : amplitudes(std::move(amps)), priors(std::move(ps)) {
    validate();
  }

  size_t size() const { return amplitudes.size(); }

  void validate() const {
    if (amplitudes.size() < 2)
      throw std::invalid_argument("ensemble: at least two amplitudes required");
    if (priors.size() != amplitudes.size())
      throw std::invalid_argument("ensemble: priors/amplitudes length mismatch");
    double sum = 0;
    for (double p : priors) {
      if (p < 0) throw std::invalid_argument("ensemble: negative prior");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("ensemble: priors sum to " + std::to_string(sum));
    for (size_t i = 0; i < amplitudes.size(); ++i)
      for (size_t j = i + 1; j < amplitudes.size(); ++j)
        if (amplitudes[i] == amplitudes[j])
          throw std::invalid_argument("ensemble: repeated amplitude");
  }
};

// {-alpha, +alpha}
inline CoherentEnsemble bpsk_ensemble(double alpha, std::vector<double> priors = {0.5, 0.5}) {
  if (!(alpha > 0)) throw std::invalid_argument("bpsk_ensemble: alpha must be positive");
  return CoherentEnsemble({Complex(-alpha), Complex(alpha)}, std::move(priors));
}

// {-alpha, 0, +alpha}
inline CoherentEnsemble threeask_ensemble(double alpha,
                                          std::vector<double> priors = {1.0 / 3, 1.0 / 3,
                                                                        1.0 / 3}) {
  if (!(alpha > 0)) throw std::invalid_argument("threeask_ensemble: alpha must be positive");
  return CoherentEnsemble({Complex(-alpha), Complex(0.0), Complex(alpha)}, std::move(priors));
}

inline ComplexMatrix gram_matrix(const CoherentEnsemble& ens) {
  const auto k = static_cast<Eigen::Index>(ens.size());
  ComplexMatrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      g(i, j) = coherent_overlap(ens.amplitudes[i], ens.amplitudes[j]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

// n equal slices, beta_j = alpha_j / sqrt(n)
struct SlicePlan {
  int n = 0;
  std::vector<Complex> betas;
};

inline SlicePlan make_slice_plan(const CoherentEnsemble& ens, int n) {
  if (n < 1) throw std::invalid_argument("make_slice_plan: n must be >= 1");
  SlicePlan plan;
  plan.n = n;
  const double root = std::sqrt(static_cast<double>(n));
  for (const Complex& a : ens.amplitudes) plan.betas.push_back(a / root);
  return plan;
}

// (|0> + beta|1>)/sqrt(1+|beta|^2)
inline ComplexVector qubit_approx(Complex beta) {
  ComplexVector v(2);
  v << 1.0, beta;
  return v / std::sqrt(1.0 + std::norm(beta));
}

enum class TransferChannel { exact_pure, ideal_swap, stirap };

inline std::string to_string(TransferChannel ch) {
  switch (ch) {
    case TransferChannel::exact_pure: return "exact-pure";
    case TransferChannel::ideal_swap: return "ideal-swap";
    case TransferChannel::stirap: return "stirap";
  }
  throw std::invalid_argument("unknown channel");
}

inline TransferChannel channel_from_string(const std::string& s) {
  if (s == "exact-pure") return TransferChannel::exact_pure;
  if (s == "ideal-swap") return TransferChannel::ideal_swap;
  if (s == "stirap") return TransferChannel::stirap;
  throw std::invalid_argument("unknown channel '" + s + "'");
}

// Qubit state delivered by the optical-to-matter transfer for one slice.
// Both lossy channels keep |h(beta)> with weight e^{-|beta|^2}(1+|beta|^2);
// the ideal-swap leak lands on |0><0|, the two-photon ladder leak on |1><1|.
inline ComplexMatrix transfer_apply(TransferChannel ch, Complex beta) {
  const ComplexVector h = qubit_approx(beta);
  const ComplexMatrix proj = h * h.adjoint();
  if (ch == TransferChannel::exact_pure) return proj;
  const double b2 = std::norm(beta);
  const double w = std::exp(-b2) * (1.0 + b2);
  ComplexMatrix leak = ComplexMatrix::Zero(2, 2);
  leak(ch == TransferChannel::ideal_swap ? 0 : 1, ch == TransferChannel::ideal_swap ? 0 : 1) =
      1.0;
  return w * proj + (1.0 - w) * leak;
}

// Fidelity <h|rho|h> of the transferred slice with the target qubit state.
inline double transfer_fidelity(TransferChannel ch, Complex beta) {
  const double b2 = std::norm(beta);
  switch (ch) {
    case TransferChannel::exact_pure: return 1.0;
    case TransferChannel::ideal_swap: return std::exp(-b2) * b2 + 1.0 / (1.0 + b2);
    case TransferChannel::stirap: return std::exp(-b2) + b2 / (1.0 + b2);
  }
  throw std::invalid_argument("unknown channel");
}

// F(alpha/sqrt(n))^n: the n-slice transfer fidelity aggregate.
inline double transfer_fidelity_power(TransferChannel ch, Complex alpha, int n) {
  if (n < 1) throw std::invalid_argument("transfer_fidelity_power: n must be >= 1");
  const Complex beta = alpha / std::sqrt(static_cast<double>(n));
  return std::pow(transfer_fidelity(ch, beta), n);
}

}  // namespace comprec
