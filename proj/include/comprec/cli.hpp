#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "comprec/compression.hpp"

namespace comprec {

// Shortest decimal string that parses back to the identical double.
inline std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

struct AlphaGrid {
  double min = 0, max = 0;
  int steps = 0;

  std::vector<double> values() const {
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i)
      v[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return v;
  }
};

struct SweepConfig {
  Alphabet alphabet = Alphabet::bpsk;
  TransferChannel channel = TransferChannel::exact_pure;
  std::vector<int> slice_counts;
  AlphaGrid alpha_grid;
  std::vector<double> priors;  // empty means uniform
  std::string output;          // empty means stdout
  std::string format = "csv";  // csv | jsonl

  void validate() const {
    if (slice_counts.empty())
      throw std::invalid_argument("sweep config: slice_counts: at least one value required");
    for (int n : slice_counts)
      if (n < 1) throw std::invalid_argument("sweep config: slice_counts: values must be >= 1");
    if (!(alpha_grid.min >= 0))
      throw std::invalid_argument("sweep config: alpha_grid.min: must be >= 0");
    if (!(alpha_grid.max > alpha_grid.min))
      throw std::invalid_argument("sweep config: alpha_grid.max: must exceed min");
    if (alpha_grid.steps < 2)
      throw std::invalid_argument("sweep config: alpha_grid.steps: must be >= 2");
    if (!priors.empty()) {
      const size_t k = alphabet == Alphabet::bpsk ? 2 : 3;
      if (priors.size() != k)
        throw std::invalid_argument("sweep config: priors: expected " + std::to_string(k) +
                                    " entries");
      double sum = 0;
      for (double p : priors) {
        if (p < 0) throw std::invalid_argument("sweep config: priors: entries must be >= 0");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("sweep config: priors: must sum to 1");
      if (alphabet == Alphabet::multimode)
        for (double p : priors)
          if (std::abs(p - 1.0 / 3.0) > 1e-12)
            throw std::invalid_argument(
                "sweep config: priors: multimode sweep supports uniform priors only");
    }
    if (format != "csv" && format != "jsonl")
      throw std::invalid_argument("sweep config: format: must be csv or jsonl");
  }
};

struct SweepRow {
  double alpha = 0;
  int n = 0;
  TransferChannel channel = TransferChannel::exact_pure;
  double receiver_error = 0;  // NaN on skipped rows
  double helstrom_bound = 0;
  double homodyne_error = 0;
  bool skipped = false;
};

// ---------------------------------------------------------------------------
// Three-codeword demo over four binary modes.
// ---------------------------------------------------------------------------

// Minimum-error bound for the demo codebook at per-mode amplitude alpha.
// Pairwise codeword overlaps: gamma^2 between neighbours, gamma^4 between the
// outer pair, gamma = exp(-2 alpha^2). The middle codeword is the isoceles
// vertex.
inline double demo_codeword_bound(double alpha) {
  if (alpha == 0) return 2.0 / 3.0;
  const double x = std::exp(-4.0 * alpha * alpha);
  const double y = std::exp(-8.0 * alpha * alpha);
  return isoceles_three_pure(x, y).error_prob;
}

// Per-mode homodyne with joint maximum-likelihood decoding of the demo
// codebook. The differences u = x0 - x2, v = x1 - x3 of the mode outcomes are
// sufficient; both are unit-variance Gaussians and the decision regions are
// intersections of half planes, so the middle-codeword success factorizes and
// the outer ones need one 1-d integral.
inline double demo_homodyne_error(double alpha) {
  if (!(alpha >= 0)) throw std::invalid_argument("demo_homodyne_error: alpha must be >= 0");
  if (alpha == 0) return 2.0 / 3.0;
  const double m = 2.0 * std::sqrt(2.0) * alpha;
  const auto phi = [](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  };
  const auto cdf = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };
  const double pc_mid = cdf(m) * cdf(m);
  // P(correct | outer) = cdf(m)^2 + int_0^inf phi(t+m) cdf(m-t) dt, Simpson rule
  const int steps = 2800;
  const double span = 14.0, h = span / steps;
  double integral = 0;
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += w * phi(t + m) * cdf(m - t);
  }
  integral *= h / 3.0;
  const double pc_outer = pc_mid + integral;
  return 1.0 - (2.0 * pc_outer + pc_mid) / 3.0;
}

struct MultimodeReport {
  double alpha = 0;
  int n = 0;
  TransferChannel channel = TransferChannel::exact_pure;
  double joint_error = 0;     // optimal collective measurement on the registers
  double baseline_error = 0;  // independent per-mode measurements, ML decoding
  double helstrom_bound = 0;  // bound for the coherent codewords themselves
  double limit_x = 0, limit_y = 0;  // codeword Gram targets exp(-4a^2), exp(-8a^2)
  double sim_x = 0, sim_y = 0;      // overlaps recovered from the simulated registers
  RunDiagnostics diagnostics;
};

inline MultimodeReport run_multimode(double alpha, int n, TransferChannel channel) {
  if (!(alpha > 0)) throw std::invalid_argument("run_multimode: alpha must be positive");
  MultimodeReport rep;
  rep.alpha = alpha;
  rep.n = n;
  rep.channel = channel;
  rep.limit_x = std::exp(-4.0 * alpha * alpha);
  rep.limit_y = std::exp(-8.0 * alpha * alpha);
  rep.helstrom_bound = demo_codeword_bound(alpha);

  const ReceiverRun mode = run_receiver(bpsk_ensemble(alpha), n, channel);
  rep.diagnostics = mode.diagnostics;
  const auto codebook = demo_codebook();
  const std::vector<ReceiverRun> runs(codebook.front().size(), mode);
  const DiscriminationProblem joint = compose_multimode(runs, codebook);
  const PovmResult pr = povm_optimize(joint, 1e-10);
  if (!pr.converged)
    throw std::runtime_error("run_multimode: joint measurement optimization did not converge");
  rep.joint_error = pr.error_prob;

  const std::vector<std::array<ComplexMatrix, 2>> mode_states(
      codebook.front().size(),
      std::array<ComplexMatrix, 2>{mode.final_states[0], mode.final_states[1]});
  rep.baseline_error =
      product_measurement_baseline(mode_states, codebook, {1.0 / 3, 1.0 / 3, 1.0 / 3});

  // purity overlap; equals |<w_i|w_j>|^2 for pure registers
  const auto overlap = [&](size_t i, size_t j) {
    return std::sqrt(std::max(0.0, (joint.states[i] * joint.states[j]).trace().real()));
  };
  rep.sim_x = overlap(0, 1);
  rep.sim_y = overlap(0, 2);
  return rep;
}

// ---------------------------------------------------------------------------
// Sweep.
// ---------------------------------------------------------------------------

namespace detail {

inline CoherentEnsemble sweep_ensemble(Alphabet a, double alpha,
                                       const std::vector<double>& priors) {
  if (a == Alphabet::bpsk)
    return priors.empty() ? bpsk_ensemble(alpha) : bpsk_ensemble(alpha, priors);
  return priors.empty() ? threeask_ensemble(alpha) : threeask_ensemble(alpha, priors);
}

}  // namespace detail

// One row per (alpha, n), alpha ascending then n ascending. Cells whose slice
// amplitude trips the guard are emitted with skipped = true and NaN receiver
// error; the bound and homodyne columns do not depend on n and are always
// filled.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<int> ns = config.slice_counts;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  const int k = config.alphabet == Alphabet::bpsk ? 2 : 3;
  std::vector<SweepRow> rows;
  rows.reserve(config.alpha_grid.steps * ns.size());
  for (double alpha : config.alpha_grid.values()) {
    double bound = 0, homodyne = 0;
    if (alpha > 0) {
      if (config.alphabet == Alphabet::multimode) {
        bound = demo_codeword_bound(alpha);
        homodyne = demo_homodyne_error(alpha);
      } else {
        const CoherentEnsemble ens = detail::sweep_ensemble(config.alphabet, alpha, config.priors);
        bound = helstrom_bound(ens);
        homodyne = homodyne_ml_error(ens);
      }
    }
    for (int n : ns) {
      SweepRow row;
      row.alpha = alpha;
      row.n = n;
      row.channel = config.channel;
      if (alpha == 0) {
        // all hypotheses coincide; guessing the most likely one is optimal
        double worst = 1.0 / k;
        for (double p : config.priors) worst = std::max(worst, p);
        row.receiver_error = row.helstrom_bound = row.homodyne_error = 1.0 - worst;
        rows.push_back(row);
        continue;
      }
      row.helstrom_bound = bound;
      row.homodyne_error = homodyne;
      try {
        if (config.alphabet == Alphabet::multimode) {
          row.receiver_error = run_multimode(alpha, n, config.channel).joint_error;
        } else {
          const ReceiverRun run = run_receiver(
              detail::sweep_ensemble(config.alphabet, alpha, config.priors), n, config.channel);
          row.receiver_error = receiver_error(run);
        }
      } catch (const BetaGuardError&) {
        row.receiver_error = std::numeric_limits<double>::quiet_NaN();
        row.skipped = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports for single runs and Gram inspection.
// ---------------------------------------------------------------------------

struct GramReport {
  Alphabet alphabet = Alphabet::bpsk;
  double alpha = 0;
  int n = 0;
  std::vector<std::string> labels;
  Eigen::MatrixXd coherent;    // pairwise overlaps of the coherent alphabet
  Eigen::MatrixXd compressed;  // overlaps of the compressed registers at this n
  double max_deviation = 0;
};

// Closed-form Gram matrices. b2 is the squared slice amplitude alpha^2/n; the
// compressed pair overlap per binary pair is ((1-b2)/(1+b2))^n and the 3ASK
// vacuum row is (1+b2)^(-n/2).
inline GramReport run_gram(Alphabet alphabet, double alpha, int n) {
  if (!(alpha > 0)) throw std::invalid_argument("run_gram: alpha must be positive");
  if (n < 1) throw std::invalid_argument("run_gram: n must be >= 1");
  const double beta = alpha / std::sqrt(static_cast<double>(n));
  if (beta >= kBetaGuard)
    throw BetaGuardError(beta, static_cast<int>(std::floor(std::pow(alpha / kBetaGuard, 2))) + 1);
  const double b2 = beta * beta;
  const double pair = std::pow((1.0 - b2) / (1.0 + b2), n);

  GramReport rep;
  rep.alphabet = alphabet;
  rep.alpha = alpha;
  rep.n = n;
  switch (alphabet) {
    case Alphabet::bpsk: {
      rep.labels = {"-alpha", "+alpha"};
      const double g = std::exp(-2.0 * alpha * alpha);
      rep.coherent = Eigen::MatrixXd{{1.0, g}, {g, 1.0}};
      rep.compressed = Eigen::MatrixXd{{1.0, pair}, {pair, 1.0}};
      break;
    }
    case Alphabet::ask3: {
      rep.labels = {"-alpha", "0", "+alpha"};
      const double g0 = std::exp(-alpha * alpha / 2.0);
      const double g = std::exp(-2.0 * alpha * alpha);
      const double c0 = std::pow(1.0 + b2, -0.5 * n);
      rep.coherent = Eigen::MatrixXd{{1.0, g0, g}, {g0, 1.0, g0}, {g, g0, 1.0}};
      rep.compressed = Eigen::MatrixXd{{1.0, c0, pair}, {c0, 1.0, c0}, {pair, c0, 1.0}};
      break;
    }
    case Alphabet::multimode: {
      rep.labels = {"w0", "w1", "w2"};
      const double g = std::exp(-2.0 * alpha * alpha);
      const double x = std::pow(g, 2), y = std::pow(g, 4);
      const double px = std::pow(pair, 2), py = std::pow(pair, 4);
      rep.coherent = Eigen::MatrixXd{{1.0, x, y}, {x, 1.0, x}, {y, x, 1.0}};
      rep.compressed = Eigen::MatrixXd{{1.0, px, py}, {px, 1.0, px}, {py, px, 1.0}};
      break;
    }
  }
  rep.max_deviation = (rep.compressed - rep.coherent).cwiseAbs().maxCoeff();
  return rep;
}

struct RunReport {
  Alphabet alphabet = Alphabet::bpsk;
  double alpha = 0;
  int n = 0;
  TransferChannel channel = TransferChannel::exact_pure;
  double receiver_error = 0;
  double helstrom_bound = 0;
  double homodyne_error = 0;
  Eigen::MatrixXd state_overlaps;  // tr(rho_i rho_j) of the final registers
  RunDiagnostics diagnostics;
};

inline RunReport run_single(Alphabet alphabet, double alpha, int n, TransferChannel channel) {
  if (!(alpha > 0)) throw std::invalid_argument("run_single: alpha must be positive");
  RunReport rep;
  rep.alphabet = alphabet;
  rep.alpha = alpha;
  rep.n = n;
  rep.channel = channel;

  std::vector<ComplexMatrix> states;
  if (alphabet == Alphabet::multimode) {
    const MultimodeReport mm = run_multimode(alpha, n, channel);
    rep.receiver_error = mm.joint_error;
    rep.helstrom_bound = mm.helstrom_bound;
    rep.homodyne_error = demo_homodyne_error(alpha);
    rep.diagnostics = mm.diagnostics;
    const ReceiverRun mode = run_receiver(bpsk_ensemble(alpha), n, channel);
    states = compose_multimode(std::vector<ReceiverRun>(4, mode), demo_codebook()).states;
  } else {
    const CoherentEnsemble ens = detail::sweep_ensemble(alphabet, alpha, {});
    const ReceiverRun run = run_receiver(ens, n, channel);
    rep.receiver_error = receiver_error(run);
    rep.helstrom_bound = helstrom_bound(ens);
    rep.homodyne_error = homodyne_ml_error(ens);
    rep.diagnostics = run.diagnostics;
    states = run.final_states;
  }
  const auto k = static_cast<Eigen::Index>(states.size());
  rep.state_overlaps.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      rep.state_overlaps(i, j) = (states[i] * states[j]).trace().real();
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization. CSV and JSON-lines writers produce byte-identical output for
// identical inputs; doubles use shortest round-trip formatting throughout.
// ---------------------------------------------------------------------------

namespace detail {

// NaN has no JSON literal; emit null
inline std::string json_number(double x) {
  return std::isnan(x) ? std::string("null") : format_double(x);
}

inline std::string json_matrix(const Eigen::MatrixXd& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ",";
    out += "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += json_number(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

inline std::string json_diagnostics(const RunDiagnostics& d) {
  return "{\"max_unitarity_residual\":" + json_number(d.max_unitarity_residual) +
         ",\"max_contract_residual\":" + json_number(d.max_contract_residual) +
         ",\"max_trace_drift\":" + json_number(d.max_trace_drift) +
         ",\"max_hermiticity\":" + json_number(d.max_hermiticity) +
         ",\"min_state_eigenvalue\":" + json_number(d.min_state_eigenvalue) + "}";
}

}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "alpha,n,channel,receiver_error,helstrom_bound,homodyne_error,skipped\n";
  for (const SweepRow& r : rows)
    os << format_double(r.alpha) << ',' << r.n << ',' << to_string(r.channel) << ','
       << format_double(r.receiver_error) << ',' << format_double(r.helstrom_bound) << ','
       << format_double(r.homodyne_error) << ',' << (r.skipped ? "true" : "false") << '\n';
}

inline void write_sweep_jsonl(std::ostream& os, const std::vector<SweepRow>& rows) {
  for (const SweepRow& r : rows)
    os << "{\"alpha\":" << format_double(r.alpha) << ",\"n\":" << r.n << ",\"channel\":\""
       << to_string(r.channel) << "\",\"receiver_error\":" << detail::json_number(r.receiver_error)
       << ",\"helstrom_bound\":" << format_double(r.helstrom_bound)
       << ",\"homodyne_error\":" << format_double(r.homodyne_error)
       << ",\"skipped\":" << (r.skipped ? "true" : "false") << "}\n";
}

inline void write_gram_text(std::ostream& os, const GramReport& rep) {
  os << "alphabet: " << to_string(rep.alphabet) << "\nalpha: " << format_double(rep.alpha)
     << "\nn: " << rep.n << "\nstates:";
  for (const auto& l : rep.labels) os << ' ' << l;
  const auto matrix = [&](const char* name, const Eigen::MatrixXd& m) {
    os << '\n' << name << ":\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      os << " ";
      for (Eigen::Index j = 0; j < m.cols(); ++j) os << ' ' << format_double(m(i, j));
      os << '\n';
    }
  };
  matrix("coherent_gram", rep.coherent);
  matrix("compressed_gram", rep.compressed);
  os << "max_deviation: " << format_double(rep.max_deviation) << '\n';
}

inline void write_gram_jsonl(std::ostream& os, const GramReport& rep) {
  os << "{\"alphabet\":\"" << to_string(rep.alphabet) << "\",\"alpha\":" << format_double(rep.alpha)
     << ",\"n\":" << rep.n << ",\"labels\":[";
  for (size_t i = 0; i < rep.labels.size(); ++i)
    os << (i ? ",\"" : "\"") << rep.labels[i] << '"';
  os << "],\"coherent_gram\":" << detail::json_matrix(rep.coherent)
     << ",\"compressed_gram\":" << detail::json_matrix(rep.compressed)
     << ",\"max_deviation\":" << format_double(rep.max_deviation) << "}\n";
}

inline void write_run_text(std::ostream& os, const RunReport& rep) {
  os << "alphabet: " << to_string(rep.alphabet) << "\nalpha: " << format_double(rep.alpha)
     << "\nn: " << rep.n << "\nchannel: " << to_string(rep.channel)
     << "\nreceiver_error: " << format_double(rep.receiver_error)
     << "\nhelstrom_bound: " << format_double(rep.helstrom_bound)
     << "\nhomodyne_error: " << format_double(rep.homodyne_error)
     << "\nmax_unitarity_residual: " << format_double(rep.diagnostics.max_unitarity_residual)
     << "\nmax_contract_residual: " << format_double(rep.diagnostics.max_contract_residual)
     << "\nmax_trace_drift: " << format_double(rep.diagnostics.max_trace_drift)
     << "\nmax_hermiticity: " << format_double(rep.diagnostics.max_hermiticity)
     << "\nmin_state_eigenvalue: " << format_double(rep.diagnostics.min_state_eigenvalue)
     << "\nstate_overlaps:\n";
  for (Eigen::Index i = 0; i < rep.state_overlaps.rows(); ++i) {
    os << " ";
    for (Eigen::Index j = 0; j < rep.state_overlaps.cols(); ++j)
      os << ' ' << format_double(rep.state_overlaps(i, j));
    os << '\n';
  }
}

inline void write_run_jsonl(std::ostream& os, const RunReport& rep) {
  os << "{\"alphabet\":\"" << to_string(rep.alphabet) << "\",\"alpha\":" << format_double(rep.alpha)
     << ",\"n\":" << rep.n << ",\"channel\":\"" << to_string(rep.channel)
     << "\",\"receiver_error\":" << format_double(rep.receiver_error)
     << ",\"helstrom_bound\":" << format_double(rep.helstrom_bound)
     << ",\"homodyne_error\":" << format_double(rep.homodyne_error)
     << ",\"diagnostics\":" << detail::json_diagnostics(rep.diagnostics)
     << ",\"state_overlaps\":" << detail::json_matrix(rep.state_overlaps) << "}\n";
}

inline void write_multimode_text(std::ostream& os, const MultimodeReport& rep) {
  os << "alpha: " << format_double(rep.alpha) << "\nn: " << rep.n
     << "\nchannel: " << to_string(rep.channel)
     << "\njoint_error: " << format_double(rep.joint_error)
     << "\nbaseline_error: " << format_double(rep.baseline_error)
     << "\nhelstrom_bound: " << format_double(rep.helstrom_bound)
     << "\ncodeword_gram_limit: " << format_double(rep.limit_x) << ' '
     << format_double(rep.limit_y)
     << "\ncodeword_gram_simulated: " << format_double(rep.sim_x) << ' '
     << format_double(rep.sim_y)
     << "\nmax_unitarity_residual: " << format_double(rep.diagnostics.max_unitarity_residual)
     << "\nmax_contract_residual: " << format_double(rep.diagnostics.max_contract_residual)
     << "\nmax_trace_drift: " << format_double(rep.diagnostics.max_trace_drift) << '\n';
}

inline void write_multimode_jsonl(std::ostream& os, const MultimodeReport& rep) {
  os << "{\"alpha\":" << format_double(rep.alpha) << ",\"n\":" << rep.n << ",\"channel\":\""
     << to_string(rep.channel) << "\",\"joint_error\":" << format_double(rep.joint_error)
     << ",\"baseline_error\":" << format_double(rep.baseline_error)
     << ",\"helstrom_bound\":" << format_double(rep.helstrom_bound)
     << ",\"limit_x\":" << format_double(rep.limit_x)
     << ",\"limit_y\":" << format_double(rep.limit_y)
     << ",\"sim_x\":" << format_double(rep.sim_x) << ",\"sim_y\":" << format_double(rep.sim_y)
     << ",\"diagnostics\":" << detail::json_diagnostics(rep.diagnostics) << "}\n";
}

}  // namespace comprec
