#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "comprec/coherent.hpp"
#include "comprec/discrimination.hpp"
#include "comprec/linalg.hpp"

namespace comprec {

// ---------------------------------------------------------------------------
// Ancilla parameter trajectories.
//
// BPSK register after absorbing ell slices of amplitude +-beta:
//   |m_{j,ell}> = (|0> + j B_ell |1>)/sqrt(1 + B_ell^2),  B_0 = 0,
//   B_{ell+1}^2 = (beta^2 + B^2)/(1 + beta^2 B^2).
// The update is a Moebius map in B^2 with fixed points +-1; in the variable
// u = (1-B^2)/(1+B^2) it is u -> u/s with s = (1+beta^2)/(1-beta^2), so
//   B_ell^2 = tanh(ell * artanh(beta^2)).
// u_ell is also the register overlap <m_{-1,ell}|m_{+1,ell}> = s^{-ell}.
// ---------------------------------------------------------------------------

namespace detail {
inline double slice_amplitude(double alpha, int n) {
  if (!(alpha > 0)) throw std::invalid_argument("slice_amplitude: alpha must be positive");
  if (n < 1) throw std::invalid_argument("slice_amplitude: n must be >= 1");
  const double beta = alpha / std::sqrt(static_cast<double>(n));
  if (beta >= 1.0)
    throw std::invalid_argument("slice_amplitude: beta = " + std::to_string(beta) +
                                " >= 1; increase n");
  return beta;
}
}  // namespace detail

inline std::vector<double> bpsk_B_trajectory(double alpha, int n) {
  const double b2 = std::pow(detail::slice_amplitude(alpha, n), 2);
  std::vector<double> traj(n + 1);
  traj[0] = 0.0;
  double B2 = 0.0;
  for (int ell = 1; ell <= n; ++ell) {
    B2 = (b2 + B2) / (1.0 + b2 * B2);
    traj[ell] = std::sqrt(B2);
  }
  return traj;
}

inline double bpsk_B_recursion(double alpha, int n, int ell) {
  if (ell < 0 || ell > n) throw std::invalid_argument("bpsk_B_recursion: need 0 <= ell <= n");
  return bpsk_B_trajectory(alpha, n)[ell];
}

inline double bpsk_B_closed(double beta, int ell) {
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("bpsk_B_closed: need 0 < beta < 1");
  if (ell < 0) throw std::invalid_argument("bpsk_B_closed: need ell >= 0");
  return std::sqrt(std::tanh(ell * std::atanh(beta * beta)));
}

// ---------------------------------------------------------------------------
// 3ASK register: |m'_{j,ell}> = (|00> + jC|01> + j^2 D|11>)/sqrt(1+j^2(C^2+D^2)),
// j in {-1,0,+1}.  Preserving the three pairwise overlaps under one absorbed
// slice forces
//   C_{ell+1}^2 = C^2 + beta^2 (1 + D^2),   D_{ell+1}^2 = D^2 + beta^2 C^2,
// whose solution with C_0 = D_0 = 0 is
//   C_ell^2 = ((1+beta^2)^ell - (1-beta^2)^ell)/2,
//   D_ell^2 = ((1+beta^2)^ell + (1-beta^2)^ell)/2 - 1.
// Note C^2 + D^2 = (1+beta^2)^ell - 1.
// ---------------------------------------------------------------------------

struct CDPair {
  double C = 0, D = 0;
};

inline std::vector<CDPair> threeask_CD_trajectory(double alpha, int n) {
  const double b2 = std::pow(detail::slice_amplitude(alpha, n), 2);
  std::vector<CDPair> traj(n + 1);
  double C2 = 0, D2 = 0;
  for (int ell = 1; ell <= n; ++ell) {
    const double c2 = C2 + b2 * (1.0 + D2);
    const double d2 = D2 + b2 * C2;
    C2 = c2;
    D2 = d2;
    traj[ell] = {std::sqrt(C2), std::sqrt(D2)};
  }
  return traj;
}

inline CDPair threeask_CD_recursion(double alpha, int n, int ell) {
  if (ell < 0 || ell > n)
    throw std::invalid_argument("threeask_CD_recursion: need 0 <= ell <= n");
  return threeask_CD_trajectory(alpha, n)[ell];
}

inline CDPair threeask_CD_closed(double beta, int ell) {
  if (!(beta > 0 && beta < 1))
    throw std::invalid_argument("threeask_CD_closed: need 0 < beta < 1");
  if (ell < 0) throw std::invalid_argument("threeask_CD_closed: need ell >= 0");
  const double p = std::pow(1.0 + beta * beta, ell);
  const double m = std::pow(1.0 - beta * beta, ell);
  return {std::sqrt((p - m) / 2.0), std::sqrt(std::max(0.0, (p + m) / 2.0 - 1.0))};
}

struct AncillaParamsBPSK {
  int ell = 0;
  double B = 0;
};

struct AncillaParams3ASK {
  int ell = 0;
  double C = 0, D = 0;
};

inline ComplexVector bpsk_register_state(double B, int j) {
  if (j != -1 && j != 1) throw std::invalid_argument("bpsk_register_state: j must be +-1");
  ComplexVector v(2);
  v << 1.0, j * B;
  return v / std::sqrt(1.0 + B * B);
}

inline ComplexVector threeask_register_state(double C, double D, int j) {
  if (j < -1 || j > 1) throw std::invalid_argument("threeask_register_state: j in {-1,0,1}");
  ComplexVector v(4);
  v << 1.0, j * C, 0.0, j * j * D;
  return v / std::sqrt(1.0 + j * j * (C * C + D * D));
}

// ---------------------------------------------------------------------------
// Unitary synthesis from state constraints.
// ---------------------------------------------------------------------------

// Returns a dim x dim unitary mapping each input vector to the corresponding
// output vector. Requires matching Gram matrices (a unitary preserving the
// inner products exists iff they agree). Both families are orthonormalized on
// their span via the Gram inverse square root, the spans are paired basis to
// basis, and the orthogonal complements are filled deterministically with
// orthonormal_completion.
inline ComplexMatrix build_state_mapper(const std::vector<ComplexVector>& inputs,
                                        const std::vector<ComplexVector>& outputs,
                                        Eigen::Index dim) {
  const auto r = static_cast<Eigen::Index>(inputs.size());
  if (r == 0 || inputs.size() != outputs.size())
    throw std::invalid_argument("build_state_mapper: need equal nonzero state counts");
  ComplexMatrix v(dim, r), w(dim, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    if (inputs[j].size() != dim || outputs[j].size() != dim)
      throw std::invalid_argument("build_state_mapper: vector dimension mismatch");
    v.col(j) = inputs[j];
    w.col(j) = outputs[j];
  }
  const ComplexMatrix g_in = v.adjoint() * v;
  const ComplexMatrix g_out = w.adjoint() * w;
  double mismatch = 0;
  Eigen::Index mi = 0, mj = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) {
      const double dev = std::abs(g_in(i, j) - g_out(i, j));
      if (dev > mismatch) { mismatch = dev; mi = i; mj = j; }
    }
  if (mismatch > kGramMatchTol)
    throw std::invalid_argument("build_state_mapper: Gram mismatch " + std::to_string(mismatch) +
                                " at pair (" + std::to_string(mi) + "," + std::to_string(mj) +
                                ")");

  // Orthonormal bases of the two spans. Rank deficiency is allowed: columns
  // that the pseudo-inverse annihilates drop out in the sweep below.
  auto span_basis = [dim](const ComplexMatrix& family,
                          const ComplexMatrix& gram) -> ComplexMatrix {
    const ComplexMatrix loewdin = family * herm_sqrt_inv(gram, true);
    std::vector<ComplexVector> basis;
    for (Eigen::Index j = 0; j < loewdin.cols(); ++j) {
      ComplexVector c = loewdin.col(j);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) c -= b * b.dot(c);
      const double nrm = c.norm();
      if (nrm > 1e-6) basis.push_back(c / nrm);
    }
    std::vector<ComplexVector> rows;
    for (const auto& b : basis) rows.push_back(b.conjugate());
    return orthonormal_completion(rows, dim).adjoint();  // columns: basis then completion
  };
  const ComplexMatrix x = span_basis(v, g_in);
  const ComplexMatrix y = span_basis(w, g_out);
  ComplexMatrix u = y * x.adjoint();

  double residual = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    residual = std::max(residual, (u * v.col(j) - w.col(j)).cwiseAbs().maxCoeff());
  if (residual > kMapperResidualTol)
    throw std::runtime_error("build_state_mapper: contract residual " +
                             std::to_string(residual));
  if (unitarity_residual(u) > kUnitaryTol)
    throw std::runtime_error("build_state_mapper: unitarity residual " +
                             std::to_string(unitarity_residual(u)));
  return u;
}

struct CompressionStep {
  ComplexMatrix unitary;
  double contract_residual = 0;   // max ||U v_j - w_j||_inf over the constraints
  double unitarity_residual = 0;  // || U^dag U - I ||_max
};

namespace detail {
inline CompressionStep make_step(const std::vector<ComplexVector>& in,
                                 const std::vector<ComplexVector>& out, Eigen::Index dim) {
  CompressionStep step;
  step.unitary = build_state_mapper(in, out, dim);
  for (size_t j = 0; j < in.size(); ++j)
    step.contract_residual = std::max(
        step.contract_residual,
        (step.unitary * in[j] - out[j]).cwiseAbs().maxCoeff());
  step.unitarity_residual = unitarity_residual(step.unitary);
  return step;
}
}  // namespace detail

// One BPSK compression step: |h_j(beta)> (x) |m_j(B)>  ->  |0> (x) |m_j(B')|.
// At B = 0 the synthesized unitary is exactly the two-qubit swap.
inline CompressionStep build_bpsk_step(double beta, double B) {
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("build_bpsk_step: need 0 < beta < 1");
  if (!(B >= 0 && B < 1)) throw std::invalid_argument("build_bpsk_step: need 0 <= B < 1");
  const double Bp = std::sqrt((beta * beta + B * B) / (1.0 + beta * beta * B * B));
  ComplexVector zero2(2);
  zero2 << 1.0, 0.0;
  std::vector<ComplexVector> in, out;
  for (int j : {-1, 1}) {
    in.push_back(kron(ComplexVector(qubit_approx(j * beta)), bpsk_register_state(B, j)));
    out.push_back(kron(zero2, bpsk_register_state(Bp, j)));
  }
  return detail::make_step(in, out, 4);
}

// One 3ASK compression step on the two-qubit register.
inline CompressionStep build_3ask_step(double beta, double C, double D) {
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("build_3ask_step: need 0 < beta < 1");
  if (C < 0 || D < 0) throw std::invalid_argument("build_3ask_step: need C, D >= 0");
  const double Cp = std::sqrt(C * C + beta * beta * (1.0 + D * D));
  const double Dp = std::sqrt(D * D + beta * beta * C * C);
  ComplexVector zero2(2);
  zero2 << 1.0, 0.0;
  std::vector<ComplexVector> in, out;
  for (int j : {-1, 0, 1}) {
    in.push_back(kron(ComplexVector(qubit_approx(j * beta)), threeask_register_state(C, D, j)));
    out.push_back(kron(zero2, threeask_register_state(Cp, Dp, j)));
  }
  return detail::make_step(in, out, 8);
}

// ---------------------------------------------------------------------------
// Receiver simulation.
// ---------------------------------------------------------------------------

enum class Alphabet { bpsk, ask3, multimode };

inline std::string to_string(Alphabet a) {
  switch (a) {
    case Alphabet::bpsk: return "bpsk";
    case Alphabet::ask3: return "3ask";
    case Alphabet::multimode: return "multimode";
  }
  throw std::invalid_argument("unknown alphabet");
}

inline Alphabet alphabet_from_string(const std::string& s) {
  if (s == "bpsk") return Alphabet::bpsk;
  if (s == "3ask") return Alphabet::ask3;
  if (s == "multimode") return Alphabet::multimode;
  throw std::invalid_argument("unknown alphabet '" + s + "'");
}

// Slice amplitudes at or above this are rejected: the qubit truncation of a
// slice is no longer meaningful.
inline constexpr double kBetaGuard = 0.95;

class BetaGuardError : public std::invalid_argument {
 public:
  BetaGuardError(double beta, int n_min)
      : std::invalid_argument("slice amplitude beta = " + std::to_string(beta) +
                              " >= " + std::to_string(kBetaGuard) +
                              "; minimal admissible n = " + std::to_string(n_min)),
        minimal_n(n_min) {}
  int minimal_n;
};

struct RunDiagnostics {
  double max_unitarity_residual = 0;
  double max_contract_residual = 0;
  double max_trace_drift = 0;       // max |tr rho - 1| over all register states
  double max_hermiticity = 0;       // max Hermiticity residual over register states
  double min_state_eigenvalue = 0;  // most negative register eigenvalue seen
};

struct ReceiverRun {
  Alphabet alphabet = Alphabet::bpsk;
  double alpha = 0;
  int n = 0;
  TransferChannel channel = TransferChannel::exact_pure;
  std::vector<double> priors;
  std::vector<ComplexMatrix> final_states;  // register state per hypothesis
  RunDiagnostics diagnostics;
};

namespace detail {

// alphabet classification: {-a,+a} -> bpsk, {-a,0,+a} -> 3ask (real a > 0)
inline Alphabet classify_alphabet(const CoherentEnsemble& ens, double* alpha_out) {
  std::vector<double> amps;
  for (const Complex& a : ens.amplitudes) {
    if (std::abs(a.imag()) > 0)
      throw std::invalid_argument("run_receiver: real amplitudes required");
    amps.push_back(a.real());
  }
  std::sort(amps.begin(), amps.end());
  const double a = amps.back();
  if (!(a > 0)) throw std::invalid_argument("run_receiver: need a positive amplitude");
  if (amps.size() == 2 && amps[0] == -a) {
    *alpha_out = a;
    return Alphabet::bpsk;
  }
  if (amps.size() == 3 && amps[0] == -a && amps[1] == 0.0) {
    *alpha_out = a;
    return Alphabet::ask3;
  }
  throw std::invalid_argument("run_receiver: alphabet must be {-a,+a} or {-a,0,+a}");
}

}  // namespace detail

// Simulates the slice-and-compress receiver: the register starts in |0...0>,
// and for each of the n slices the transferred slice state is appended,
// rotated by the cached step unitary, and the slice is traced out. The step
// unitaries are those designed for the exact pure trajectory; lossy channels
// run through the same hardware.
inline ReceiverRun run_receiver(const CoherentEnsemble& ens, int n, TransferChannel channel) {
  ReceiverRun run;
  run.alphabet = detail::classify_alphabet(ens, &run.alpha);
  if (n < 1) throw std::invalid_argument("run_receiver: n must be >= 1");
  run.n = n;
  run.channel = channel;
  run.priors = ens.priors;

  const double beta = run.alpha / std::sqrt(static_cast<double>(n));
  if (beta >= kBetaGuard)
    throw BetaGuardError(beta, static_cast<int>(std::floor(std::pow(run.alpha / kBetaGuard, 2))) + 1);

  // hypothesis amplitudes in ensemble order
  const SlicePlan plan = make_slice_plan(ens, n);

  // step unitaries depend on the trajectory only, so one cache serves every
  // hypothesis
  std::vector<CompressionStep> steps;
  steps.reserve(n);
  if (run.alphabet == Alphabet::bpsk) {
    const auto traj = bpsk_B_trajectory(run.alpha, n);
    for (int ell = 0; ell < n; ++ell) steps.push_back(build_bpsk_step(beta, traj[ell]));
  } else {
    const auto traj = threeask_CD_trajectory(run.alpha, n);
    for (int ell = 0; ell < n; ++ell)
      steps.push_back(build_3ask_step(beta, traj[ell].C, traj[ell].D));
  }
  for (const auto& s : steps) {
    run.diagnostics.max_unitarity_residual =
        std::max(run.diagnostics.max_unitarity_residual, s.unitarity_residual);
    run.diagnostics.max_contract_residual =
        std::max(run.diagnostics.max_contract_residual, s.contract_residual);
  }

  const Eigen::Index reg_dim = run.alphabet == Alphabet::bpsk ? 2 : 4;
  run.diagnostics.min_state_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t hyp = 0; hyp < ens.size(); ++hyp) {
    ComplexMatrix reg = ComplexMatrix::Zero(reg_dim, reg_dim);
    reg(0, 0) = 1.0;
    const ComplexMatrix slice = transfer_apply(channel, plan.betas[hyp]);
    for (int ell = 0; ell < n; ++ell) {
      const ComplexMatrix joint =
          steps[ell].unitary * kron(slice, reg) * steps[ell].unitary.adjoint();
      reg = partial_trace(joint, 2, reg_dim, Subsystem::second);
      const DensityResiduals r = density_residuals(reg);
      run.diagnostics.max_trace_drift = std::max(run.diagnostics.max_trace_drift,
                                                 r.trace_deviation);
      run.diagnostics.max_hermiticity = std::max(run.diagnostics.max_hermiticity,
                                                 r.hermiticity);
      run.diagnostics.min_state_eigenvalue = std::min(run.diagnostics.min_state_eigenvalue,
                                                      r.min_eigenvalue);
      if (r.min_eigenvalue < kPsdFloor || r.trace_deviation > 1e-10)
        throw std::runtime_error("run_receiver: register state invariant violated at step " +
                                 std::to_string(ell));
    }
    run.final_states.push_back(reg);
  }
  return run;
}

// Measurement stage: minimum-error discrimination of the final register states.
inline double receiver_error(const ReceiverRun& run) {
  if (run.final_states.size() == 2)
    return helstrom_binary_mixed(run.final_states[0], run.final_states[1], run.priors[0]);
  DiscriminationProblem prob{run.final_states, run.priors};
  const PovmResult r = povm_optimize(prob, 1e-10);
  if (!r.converged)
    throw std::runtime_error("receiver_error: measurement optimization did not converge");
  return r.error_prob;
}

// ---------------------------------------------------------------------------
// Multimode composition.
// ---------------------------------------------------------------------------

// Codewords are sign patterns over the modes; each mode m contributes its
// final register state for sign codewords[k][m]. Mode 0 is the major index of
// the joint space.
inline DiscriminationProblem compose_multimode(const std::vector<ReceiverRun>& mode_runs,
                                               const std::vector<std::vector<int>>& codewords,
                                               std::vector<double> priors = {}) {
  if (mode_runs.empty()) throw std::invalid_argument("compose_multimode: no modes");
  for (const auto& run : mode_runs) {
    if (run.alphabet != Alphabet::bpsk)
      throw std::invalid_argument("compose_multimode: per-mode runs must be binary");
    if (run.n != mode_runs[0].n || run.channel != mode_runs[0].channel)
      throw std::invalid_argument("compose_multimode: runs must share n and channel");
  }
  const size_t k = codewords.size();
  if (k < 2) throw std::invalid_argument("compose_multimode: need >= 2 codewords");
  if (priors.empty()) priors.assign(k, 1.0 / static_cast<double>(k));
  for (size_t a = 0; a < k; ++a) {
    if (codewords[a].size() != mode_runs.size())
      throw std::invalid_argument("compose_multimode: codeword length mismatch");
    for (int s : codewords[a])
      if (s != -1 && s != 1)
        throw std::invalid_argument("compose_multimode: codeword entries must be +-1");
    for (size_t b = a + 1; b < k; ++b)
      if (codewords[a] == codewords[b])
        throw std::invalid_argument("compose_multimode: repeated codeword");
  }

  DiscriminationProblem prob;
  prob.priors = std::move(priors);
  for (const auto& w : codewords) {
    ComplexMatrix joint = ComplexMatrix::Identity(1, 1);
    for (size_t m = 0; m < mode_runs.size(); ++m)
      joint = kron(joint, mode_runs[m].final_states[w[m] == -1 ? 0 : 1]).eval();
    prob.states.push_back(joint);
  }
  return prob;
}

// The three-codeword, four-mode demo codebook.
inline std::vector<std::vector<int>> demo_codebook() {
  return {{+1, +1, -1, -1}, {-1, +1, +1, -1}, {-1, -1, +1, +1}};
}

}  // namespace comprec
