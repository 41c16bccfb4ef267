#include "catch_amalgamated.hpp"

#include "comprec/coherent.hpp"
#include "test_helpers.hpp"

using namespace comprec;
using Catch::Matchers::WithinAbs;

TEST_CASE("coherent_overlap against number-basis summation") {
  const Complex pairs[][2] = {
      {{0.5, 0.0}, {-0.5, 0.0}},
      {{1.2, 0.3}, {0.4, -0.7}},
      {{0.0, 0.0}, {0.8, 0.0}},
      {{2.0, 1.0}, {2.0, 1.0}},
  };
  for (const auto& p : pairs) {
    const Complex got = coherent_overlap(p[0], p[1]);
    const Complex want = testutil::coherent_overlap_fock(p[0], p[1], 120);
    CAPTURE(p[0], p[1]);
    CHECK(std::abs(got - want) < 1e-13);
  }
}

TEST_CASE("coherent_overlap special values") {
  CHECK_THAT(coherent_overlap(-0.5, 0.5).real(), WithinAbs(std::exp(-0.5), 1e-15));
  CHECK_THAT(coherent_overlap(0.0, 0.5).real(), WithinAbs(std::exp(-0.125), 1e-15));
  CHECK_THAT(std::abs(coherent_overlap(Complex(0.3, 0.4), Complex(0.3, 0.4))),
             WithinAbs(1.0, 1e-15));
}

TEST_CASE("ensemble construction and validation") {
  const CoherentEnsemble bpsk = bpsk_ensemble(0.5);
  REQUIRE(bpsk.size() == 2);
  CHECK(bpsk.amplitudes[0] == Complex(-0.5));
  CHECK(bpsk.amplitudes[1] == Complex(0.5));
  CHECK(bpsk.priors[0] == 0.5);

  const CoherentEnsemble ask = threeask_ensemble(0.8);
  REQUIRE(ask.size() == 3);
  CHECK(ask.amplitudes[1] == Complex(0.0));

  CHECK_THROWS_AS(bpsk_ensemble(0.5, {0.6, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(bpsk_ensemble(0.5, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(bpsk_ensemble(0.5, {0.5, 0.3, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(CoherentEnsemble({Complex(0.5), Complex(0.5)}, {0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("gram matrix is a valid pure-state Gram") {
  const ComplexMatrix g = gram_matrix(threeask_ensemble(0.8));
  REQUIRE(g.rows() == 3);
  for (int i = 0; i < 3; ++i) CHECK_THAT(g(i, i).real(), WithinAbs(1.0, 1e-15));
  CHECK(hermiticity_residual(g) < 1e-15);
  CHECK(min_hermitian_eigenvalue(g) > -1e-12);
  CHECK_THAT(g(0, 2).real(), WithinAbs(std::exp(-2 * 0.64), 1e-15));
  CHECK_THAT(g(0, 1).real(), WithinAbs(std::exp(-0.32), 1e-15));
}

TEST_CASE("slice plan scales amplitudes by sqrt(n)") {
  const SlicePlan plan = make_slice_plan(bpsk_ensemble(0.9), 9);
  REQUIRE(plan.n == 9);
  CHECK_THAT(plan.betas[1].real(), WithinAbs(0.3, 1e-15));
  CHECK_THAT(plan.betas[0].real(), WithinAbs(-0.3, 1e-15));
  CHECK_THROWS_AS(make_slice_plan(bpsk_ensemble(0.9), 0), std::invalid_argument);
}

TEST_CASE("qubit slice approximation") {
  const ComplexVector h = qubit_approx(0.3);
  CHECK_THAT(h.norm(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(h(1).real() / h(0).real(), WithinAbs(0.3, 1e-15));

  // pair overlap agrees with the coherent one through fourth order; the
  // leading deviation is (2/3) beta^6
  const double beta = 0.1;
  const Complex qo = qubit_approx(beta).dot(qubit_approx(-beta));
  const Complex co = coherent_overlap(beta, -beta);
  CHECK(std::abs(qo - co) < std::pow(beta, 6));
  CHECK(std::abs(qo - co) > std::pow(beta, 6) / 3);
}

TEST_CASE("channel names round-trip") {
  for (TransferChannel ch :
       {TransferChannel::exact_pure, TransferChannel::ideal_swap, TransferChannel::stirap})
    CHECK(channel_from_string(to_string(ch)) == ch);
  CHECK(to_string(TransferChannel::ideal_swap) == "ideal-swap");
  CHECK_THROWS_AS(channel_from_string("nope"), std::invalid_argument);
}

TEST_CASE("transfer channels produce valid states with the right structure") {
  const Complex beta = 0.2;
  const ComplexVector h = qubit_approx(beta);

  const ComplexMatrix exact = transfer_apply(TransferChannel::exact_pure, beta);
  CHECK(max_abs(exact - h * h.adjoint()) < 1e-15);

  const double w = std::exp(-0.04) * 1.04;
  ComplexVector g0(2), g1(2);
  g0 << 1.0, 0.0;
  g1 << 0.0, 1.0;
  const ComplexMatrix swap = transfer_apply(TransferChannel::ideal_swap, beta);
  CHECK(max_abs(swap - (w * h * h.adjoint() + (1 - w) * g0 * g0.adjoint())) < 1e-15);
  const ComplexMatrix stirap = transfer_apply(TransferChannel::stirap, beta);
  CHECK(max_abs(stirap - (w * h * h.adjoint() + (1 - w) * g1 * g1.adjoint())) < 1e-15);

  for (const ComplexMatrix* rho : {&exact, &swap, &stirap})
    CHECK_NOTHROW(require_density_matrix(*rho, "transfer"));
}

TEST_CASE("transfer fidelities match the channel output") {
  // fidelity of the channel output against the ideal pure slice
  for (TransferChannel ch : {TransferChannel::ideal_swap, TransferChannel::stirap}) {
    for (double b : {0.1, 0.25, 0.6}) {
      const ComplexVector h = qubit_approx(b);
      const ComplexMatrix rho = transfer_apply(ch, b);
      const double direct = (h.adjoint() * rho * h)(0, 0).real();
      CHECK_THAT(transfer_fidelity(ch, b), WithinAbs(direct, 1e-14));
    }
  }
  CHECK_THAT(transfer_fidelity(TransferChannel::exact_pure, 0.7), WithinAbs(1.0, 0.0));
  CHECK_THAT(transfer_fidelity(TransferChannel::ideal_swap, 0.2),
             WithinAbs(0.9999700391045544, 1e-15));
  CHECK_THAT(transfer_fidelity(TransferChannel::stirap, 0.2),
             WithinAbs(0.9992509776138616, 1e-15));
}

TEST_CASE("transfer infidelities have the expected leading order") {
  // 1 - F ~ b^6/2 for the excitation-preserving channel, b^4/2 for the
  // excitation-exchange one
  const double b = 0.01;
  const double ia = 1 - transfer_fidelity(TransferChannel::ideal_swap, b);
  const double ib = 1 - transfer_fidelity(TransferChannel::stirap, b);
  CHECK_THAT(ia / (std::pow(b, 6) / 2), WithinAbs(1.0, 1e-3));
  CHECK_THAT(ib / (std::pow(b, 4) / 2), WithinAbs(1.0, 1e-3));
}

TEST_CASE("transfer fidelity power composes per slice") {
  const double f = transfer_fidelity(TransferChannel::stirap, Complex(1.0 / std::sqrt(8.0)));
  CHECK_THAT(transfer_fidelity_power(TransferChannel::stirap, 1.0, 8),
             WithinAbs(std::pow(f, 8), 1e-15));
}
