#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cbs/dense_verify.hpp"

using namespace cbs;
using namespace cbs::verify;
using Catch::Approx;

namespace {

std::mt19937_64 rng(2024);

DenseOperator random_symmetric(int n) {
  std::normal_distribution<double> gauss;
  DenseOperator a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      a(i, j) = Complex(gauss(rng), 0.0);
      a(j, i) = a(i, j);
    }
  return a;
}

DenseOperator diag_from(const std::vector<Complex>& d) {
  DenseOperator v = DenseOperator::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v(i, i) = d[i];
  return v;
}

/// Diagonal V = Delta - i eps with Delta drawn from the admissible half-disk.
DenseOperator random_admissible(int n, double eps, double min_im_frac) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DenseOperator v = DenseOperator::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double re, im;
    do {
      re = (2.0 * unit(rng) - 1.0) * 0.95 * eps;
      im = unit(rng) * 0.95 * eps;
    } while (re * re + im * im > 0.9025 * eps * eps || im < min_im_frac * eps);
    v(i, i) = Complex(re, im - eps);
  }
  return v;
}

}  // namespace

TEST_CASE("reference operator: closed-form circulant spectrum") {
  const double k0 = 1.3;
  const double h = 0.7;
  DenseOperator a = build_reference_operator(4, ReferenceVariant::laplacian_1d_periodic, k0, h);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);

  Eigen::SelfAdjointEigenSolver<DenseOperator> es(a);
  std::vector<double> expected;
  for (int j = 0; j < 4; ++j)
    expected.push_back(k0 * k0 -
                       (2.0 / (h * h)) * (1.0 - std::cos(2.0 * std::numbers::pi * j / 4.0)));
  std::sort(expected.begin(), expected.end());
  for (int j = 0; j < 4; ++j) CHECK(es.eigenvalues()[j] == Approx(expected[j]).margin(1e-12));
}

TEST_CASE("reference operator: 2D spectrum is the tensor sum of 1D spectra") {
  const double k0 = 0.9;
  const int n = 4;
  DenseOperator a2 = build_reference_operator(n, ReferenceVariant::laplacian_2d_periodic, k0);
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(a2);

  std::vector<double> expected;
  auto mode = [&](int j) { return -2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * j / n)); };
  for (int jx = 0; jx < n; ++jx)
    for (int jy = 0; jy < n; ++jy) expected.push_back(k0 * k0 + mode(jx) + mode(jy));
  std::sort(expected.begin(), expected.end());
  for (int j = 0; j < n * n; ++j) CHECK(es.eigenvalues()[j] == Approx(expected[j]).margin(1e-11));
}

TEST_CASE("cayley transform basics") {
  SECTION("A = 0 maps to -I") {
    DenseOperator zero = DenseOperator::Zero(6, 6);
    DenseOperator u = cayley(zero, 2.5);
    CHECK((u + DenseOperator::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("scalar case A = lambda I") {
    const double lambda = 1.7;
    const double eps = 0.4;
    DenseOperator a = lambda * DenseOperator::Identity(5, 5);
    DenseOperator u = cayley(a, eps);
    const Complex expect = Complex(lambda, -eps) / Complex(lambda, eps);
    CHECK((u - expect * DenseOperator::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-13);
  }

  SECTION("unitary with unimodular spectrum for random symmetric A") {
    for (double eps : {0.1, 1.0, 10.0}) {
      DenseOperator a = random_symmetric(8);
      DenseOperator u = cayley(a, eps);
      CHECK((u.adjoint() * u - DenseOperator::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
      Eigen::ComplexEigenSolver<DenseOperator> es(u);
      for (int i = 0; i < 8; ++i) CHECK(std::abs(std::abs(es.eigenvalues()[i]) - 1.0) < 1e-12);
    }
  }

  SECTION("non-self-adjoint input is rejected") {
    DenseOperator a = DenseOperator::Zero(4, 4);
    a(0, 1) = Complex(1.0, 0.0);
    CHECK_THROWS_AS(cayley(a, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(cayley(DenseOperator::Zero(4, 4), 0.0), InvalidParameterError);
  }
}

TEST_CASE("resolvent identity deviations") {
  CHECK(check_resolvent_identity(DenseOperator::Zero(4, 4), 1.0) < 1e-15);
  for (int t = 0; t < 5; ++t)
    CHECK(check_resolvent_identity(random_symmetric(8), 1.0) < 1e-12);
  DenseOperator lap = build_reference_operator(16, ReferenceVariant::laplacian_1d_periodic);
  CHECK(check_resolvent_identity(lap, 0.5) < 1e-11);
}

TEST_CASE("CBS operator: homogeneous and empty potentials") {
  const double eps = 0.8;
  const int n = 6;
  DenseOperator a = random_symmetric(n);
  const DenseOperator id = DenseOperator::Identity(n, n);

  SECTION("V = -i eps I gives M = (I - U)/2") {
    DenseOperator v = Complex(0.0, -eps) * id;
    CbsOperators ops = cbs_operator_dense(a, v, eps);
    DenseOperator u = cayley(a, eps);
    CHECK((ops.m_direct - 0.5 * (id - u)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ops.m_direct - ops.m_cayley).cwiseAbs().maxCoeff() < 1e-12);
  }

  SECTION("V = 0 gives M = I") {
    CbsOperators ops = cbs_operator_dense(a, DenseOperator::Zero(n, n), eps);
    CHECK((ops.m_direct - id).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ops.m_cayley - id).cwiseAbs().maxCoeff() < 1e-13);
  }

  SECTION("non-diagonal V is rejected") {
    DenseOperator v = DenseOperator::Zero(n, n);
    v(1, 2) = 1.0;
    CHECK_THROWS_AS(cbs_operator_dense(a, v, eps), InvalidParameterError);
  }
}

TEST_CASE("direct and Cayley constructions of M agree") {
  for (double eps : {0.1, 1.0, 10.0}) {
    DenseOperator a = random_symmetric(12);
    DenseOperator v = random_admissible(12, eps, 0.0);
    CbsOperators ops = cbs_operator_dense(a, v, eps);
    CHECK((ops.m_direct - ops.m_cayley).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("numerical range sampling") {
  const DenseOperator half = 0.5 * DenseOperator::Identity(16, 16);
  CHECK(numerical_range_samples(half, 200) == Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(numerical_range_samples(half, 10), InvalidParameterError);
}

TEST_CASE("contractivity for admissible potentials, growth for inadmissible ones") {
  const double eps = 1.0;
  const int n = 64;

  SECTION("absorbing admissible V: spectral radius and field of values below one") {
    for (int t = 0; t < 3; ++t) {
      DenseOperator a = random_symmetric(n);
      DenseOperator v = random_admissible(n, eps, 0.05);
      DenseOperator m = cbs_operator_dense(a, v, eps).m_direct;
      const double rho = spectral_radius(m);
      const double fov = field_of_values_max(m);
      const double sampled = numerical_range_samples(m, 200);
      INFO("rho " << rho << " fov " << fov);
      CHECK(rho < 1.0);
      CHECK(fov < 1.0);
      CHECK(sampled <= fov + 1e-12);
      CHECK(rho <= fov + 1e-12);
    }
  }

  SECTION("inadmissible |Delta| = 2 eps without absorption can amplify") {
    // Spectrum of A must reach the amplifying modes; the shifted discrete
    // Laplacian with a fine mesh does.
    DenseOperator a =
        build_reference_operator(n, ReferenceVariant::laplacian_1d_periodic, 1.0, 0.35);
    std::vector<Complex> d(n, Complex(2.0 * eps, -eps));  // Delta = 2 eps, real
    DenseOperator m = cbs_operator_dense(a, diag_from(d), eps).m_direct;
    CHECK(spectral_radius(m) >= 1.0);
    CHECK(field_of_values_max(m) >= 1.0);
  }
}

TEST_CASE("spectral radius basics and the marginal homogeneous case") {
  std::vector<Complex> d = {Complex(0.3, 0.0), Complex(0.0, -0.9)};
  CHECK(spectral_radius(diag_from(d)) == Approx(0.9));

  // Lossless homogeneous potential V = -i eps I with 0 in the spectrum of A:
  // the on-shell mode maps to an M-eigenvalue of modulus one.
  const double eps = 0.6;
  const int n = 8;
  DenseOperator a = random_symmetric(n);
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(a);
  DenseOperator shifted = a - es.eigenvalues()[3] * DenseOperator::Identity(n, n);
  DenseOperator v = Complex(0.0, -eps) * DenseOperator::Identity(n, n);
  DenseOperator m = cbs_operator_dense(shifted, v, eps).m_direct;
  CHECK(spectral_radius(m) == Approx(1.0).epsilon(1e-10));

  // strictly absorbing V pushes the radius strictly below one
  std::vector<Complex> dd(n);
  for (int i = 0; i < n; ++i) dd[i] = Complex(0.0, 0.1 * eps) + Complex(0.0, -eps);
  DenseOperator m2 = cbs_operator_dense(shifted, diag_from(dd), eps).m_direct;
  CHECK(spectral_radius(m2) < 1.0 - 1e-3);
}

TEST_CASE("admissibility checks on Delta eigenvalues") {
  const double eps = 0.75;

  SECTION("gain entry Delta = -i eps fails the Im condition") {
    DiagonalData v(1);
    v[0] = Complex(0.0, -2.0 * eps);  // Delta = v + i eps = -i eps
    AdmissibilityReport rep = check_admissibility(v, eps);
    CHECK_FALSE(rep.admissible);
    CHECK(rep.worst_delta.imag() == Approx(-eps));
  }

  SECTION("homogeneous V = -i eps (Delta = 0) is admissible but marginal") {
    DiagonalData v(1);
    v[0] = Complex(0.0, -eps);
    AdmissibilityReport rep = check_admissibility(v, eps);
    CHECK(rep.admissible);
    CHECK_FALSE(rep.strict);
    // Eq.(21) holds with equality: |eps^2 - (i eps)^2| + eps^2 = 2 eps^2
    CHECK(rep.eq21_all);
  }

  SECTION("random upper-half-disk sweep satisfies the scalar inequality") {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DiagonalData v(10000);
    for (int i = 0; i < v.size(); ++i) {
      double re, im;
      do {
        re = 2.0 * unit(rng) - 1.0;
        im = unit(rng);
      } while (re * re + im * im > 1.0);
      v[i] = Complex(re * eps, (im - 1.0) * eps);  // Delta in the admissible half-disk
    }
    AdmissibilityReport rep = check_admissibility(v, eps);
    CHECK(rep.admissible);
    CHECK(rep.eq21_all);
    CHECK(rep.implication_ok);
  }

  SECTION("inadmissible entries break Eq.(22) but the implication stays intact") {
    DiagonalData v(3);
    v[0] = Complex(2.0 * eps, -eps);   // |Delta| = 2 eps
    v[1] = Complex(0.0, -0.5 * eps);   // Delta = 0.5 i eps, fine
    v[2] = Complex(0.2 * eps, -eps);   // Delta real small, marginal
    AdmissibilityReport rep = check_admissibility(v, eps);
    CHECK_FALSE(rep.admissible);
    CHECK(rep.implication_ok);
  }
}

TEST_CASE("VUV norm bound for unitary U and diagonal V") {
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 20; ++t) {
    const int n = 10;
    DenseOperator u = cayley(random_symmetric(n), 0.5 + t * 0.1);
    std::vector<Complex> d(n);
    for (auto& z : d) z = Complex(gauss(rng), gauss(rng));
    DenseOperator v = diag_from(d);
    const double lhs = (v * u * v).jacobiSvd().singularValues()[0];
    const double vnorm = v.cwiseAbs().maxCoeff();
    CHECK(lhs <= vnorm * vnorm * (1.0 + 1e-12));
  }
}
