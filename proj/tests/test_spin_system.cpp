#include "otto/spin_system.hpp"

#include "reference_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace otto {
namespace {

TEST(SpinSystem, SpectrumAtReferenceField) {
  const auto e = eigensystem(1.0, 1.0, 1.0).sorted_energies();
  EXPECT_NEAR(e[0], -reference::kSqrt8, 1e-12);
  EXPECT_NEAR(e[1], -2.0, 1e-12);
  EXPECT_NEAR(e[2], 2.0, 1e-12);
  EXPECT_NEAR(e[3], reference::kSqrt8, 1e-12);
}

TEST(SpinSystem, LabelledEnergies) {
  const EigenSystem es = eigensystem(0.5, 1.0, 0.2);
  const double k = std::hypot(0.5, 0.2);
  EXPECT_DOUBLE_EQ(es.k, k);
  EXPECT_NEAR(es.energies[0], -2.0 * k, 1e-15);
  EXPECT_NEAR(es.energies[1], -2.0, 1e-15);
  EXPECT_NEAR(es.energies[2], 2.0, 1e-15);
  EXPECT_NEAR(es.energies[3], 2.0 * k, 1e-15);
  // K < J here, so the label order is not the energy order.
  EXPECT_EQ(es.ascending()[0], 1);
}

TEST(SpinSystem, GroundStateCoefficients) {
  const EigenSystem es = eigensystem(2.0, 1.0, 1.0);
  const double s2 = std::sqrt(2.0);
  EXPECT_NEAR(es.vectors[0](0).real(), reference::kGroundB2_00 / s2, 1e-12);
  EXPECT_NEAR(es.vectors[0](3).real(), reference::kGroundB2_11 / s2, 1e-12);
  EXPECT_NEAR(es.vectors[0](1).real(), 0.0, 0.0);
}

TEST(SpinSystem, HamiltonianMatrixElements) {
  const double b = 0.7, j = 1.3, g = 0.4;
  const Operator h = hamiltonian(b, j, g);
  EXPECT_NEAR(h(0, 0).real(), -2.0 * b, 1e-14);
  EXPECT_NEAR(h(3, 3).real(), 2.0 * b, 1e-14);
  EXPECT_NEAR(h(0, 3).real(), 2.0 * g * j, 1e-14);
  EXPECT_NEAR(h(1, 2).real(), 2.0 * j, 1e-14);
  EXPECT_NEAR(h(1, 1).real(), 0.0, 1e-14);
  EXPECT_LT(hermiticity_residual(h), 1e-15);
  EXPECT_LT(max_norm(h.imag()), 1e-15);
}

TEST(SpinSystem, ExchangePairDoesNotDependOnField) {
  const EigenSystem a = eigensystem(0.1, 1.0, 0.5);
  const EigenSystem b = eigensystem(7.0, 1.0, 0.5);
  EXPECT_LT(max_norm(a.vectors[1] - b.vectors[1]), 1e-15);
  EXPECT_LT(max_norm(a.vectors[2] - b.vectors[2]), 1e-15);
}

TEST(SpinSystem, RandomParametersDiagonalize) {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> field(0.0, 5.0), coupling(0.1, 3.0), gamma(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double b = field(rng), j = coupling(rng), g = gamma(rng);
    const EigenSystem es = eigensystem(b, j, g);
    const Operator h = hamiltonian(b, j, g);
    EXPECT_LT(max_norm(es.reconstruct() - h), 1e-12) << b << ' ' << j << ' ' << g;
    for (int i = 0; i < 4; ++i) {
      EXPECT_LT(max_norm(h * es.vectors[i] - es.energies[i] * es.vectors[i]), 1e-12);
      for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(std::abs(es.vectors[i].dot(es.vectors[k])), i == k ? 1.0 : 0.0, 1e-13);
    }
    EXPECT_GE(es.vectors[0](0).real(), 0.0);
  }
}

TEST(SpinSystem, SmallAnisotropyIsStable) {
  for (double g : {1e-6, 1e-9, 1e-13, -1e-13}) {
    const EigenSystem es = eigensystem(1.0, 1.0, g);
    // Below the product-branch threshold the 2 gamma J mixing element is dropped.
    const double dropped = es.product_branch ? 2.0 * std::abs(g) : 0.0;
    EXPECT_LT(max_norm(es.reconstruct() - hamiltonian(1.0, 1.0, g)), 1e-14 + dropped);
    EXPECT_NEAR(es.vectors[0].norm(), 1.0, 1e-15);
  }
}

TEST(SpinSystem, ProductBranchAtZeroAnisotropy) {
  const EigenSystem es = eigensystem(1.0, 1.0, 0.0);
  EXPECT_TRUE(es.product_branch);
  EXPECT_EQ(es.vectors[0], basis_ket(0));
  EXPECT_EQ(es.vectors[3], basis_ket(3));
  EXPECT_FALSE(eigensystem(1.0, 1.0, 1e-3).product_branch);
}

TEST(SpinSystem, ZeroFieldIsAllowedWithCoupling) {
  const EigenSystem es = eigensystem(0.0, 1.0, 1.0);
  EXPECT_NEAR(es.k, 1.0, 1e-15);
  EXPECT_LT(max_norm(es.reconstruct() - hamiltonian(0.0, 1.0, 1.0)), 1e-14);
}

TEST(SpinSystem, InvalidInputs) {
  EXPECT_THROW(eigensystem(-1.0, 1.0, 1.0), Error);
  try {
    eigensystem(0.0, 0.0, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSpectrum);
  }
  try {
    thermal_state(1.0, 1.0, 1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveTemperature);
  }
  EXPECT_THROW(thermal_state(1.0, 1.0, 1.0, -2.0), Error);
}

TEST(SpinSystem, PartitionFunctionReference) {
  EXPECT_NEAR(partition_function(std::sqrt(2.0), 1.0, 1.0), reference::kPartitionB1, 1e-12);
  EXPECT_NEAR(thermal_state(1.0, 1.0, 1.0, 1.0).partition, reference::kPartitionB1, 1e-12);
}

TEST(SpinSystem, ThermalStateReference) {
  const ThermalState ts = thermal_state(1.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(ts.populations[0], reference::kGroundOccupationB1, 1e-12);
  EXPECT_NEAR(expectation(ts.rho, hamiltonian(1.0, 1.0, 1.0)), reference::kEnergyA, 1e-12);
}

TEST(SpinSystem, ThermalStateIsDensityMatrix) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> field(0.0, 4.0), gamma(0.0, 1.0), beta(0.01, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ThermalState ts = thermal_state(field(rng), 1.0, gamma(rng), beta(rng));
    const DensityCheck c = check_density(ts.rho);
    EXPECT_LT(std::abs(c.trace_error), 1e-14);
    EXPECT_LT(c.hermiticity, 1e-15);
    EXPECT_GT(c.min_eigenvalue, -1e-14);
  }
}

TEST(SpinSystem, ThermalStateExtremes) {
  const ThermalState cold = thermal_state(1.0, 1.0, 1.0, 1e4);
  EXPECT_NEAR(cold.populations[0], 1.0, 1e-14);
  EXPECT_LT(max_norm(cold.rho - ground_state(1.0, 1.0, 1.0)), 1e-14);
  const ThermalState hot = thermal_state(1.0, 1.0, 1.0, 1e-12);
  EXPECT_LT(max_norm(hot.rho - 0.25 * Operator::Identity()), 1e-10);
}

TEST(SpinSystem, MeasurementBasisIsOrthonormalAndComplete) {
  const MeasurementBasis m = measurement_basis();
  const auto kets = m.kets();
  Operator sum = Operator::Zero();
  for (int a = 0; a < 4; ++a) {
    sum += m.projector(a);
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(std::abs(kets[a].dot(kets[b])), a == b ? 1.0 : 0.0, 1e-15);
  }
  EXPECT_LT(max_norm(sum - Operator::Identity()), 1e-15);
  EXPECT_NEAR(m.psi_plus(0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(m.psi_minus(3).real(), -1.0 / std::sqrt(2.0), 1e-15);
}

TEST(SpinSystem, StaticOverlapWithBellState) {
  const EigenSystem es = eigensystem(2.0, 1.0, 1.0);
  EXPECT_NEAR(std::norm(es.vectors[0].dot(measurement_basis().psi_plus)), reference::kChiB2, 1e-14);
}

TEST(SpinSystem, EngineParamsValidation) {
  EngineParams p;
  EXPECT_NO_THROW(p.validate());
  p.temperature = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.tau = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

}  // namespace
}  // namespace otto
