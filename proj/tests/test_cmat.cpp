/* Copyright 2026 The PulsePINN Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "pulsepinn/cmat.hpp"

using namespace pulsepinn;
using namespace pulsepinn::cx;
using cd = std::complex<double>;

namespace {

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m.set(0, 1, 1.0);
  m.set(1, 0, 1.0);
  return m;
}
CMatrix pauli_y() {
  CMatrix m(2, 2);
  m.set(0, 1, cd(0, -1));
  m.set(1, 0, cd(0, 1));
  return m;
}
CMatrix pauli_z() {
  CMatrix m(2, 2);
  m.set(0, 0, 1.0);
  m.set(1, 1, -1.0);
  return m;
}

CMatrix heisenberg_drift() {
  const CMatrix xx = kron(pauli_x(), pauli_x());
  const CMatrix yy = kron(pauli_y(), pauli_y());
  const CMatrix zz = kron(pauli_z(), pauli_z());
  return scale(add(add(xx, yy), zz), 0.5);
}

CMatrix random_cmat(std::mt19937_64& rng, int d, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  CMatrix m(d, d);
  for (auto& v : m.re) v = u(rng);
  for (auto& v : m.im) v = u(rng);
  return m;
}

CMatrix random_hermitian(std::mt19937_64& rng, int d, double amp = 1.0) {
  const CMatrix m = random_cmat(rng, d, amp);
  return scale(add(m, adjoint(m)), 0.5);
}

CVector random_unit(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector x(d);
  for (int i = 0; i < d; ++i) x.set(i, cd(u(rng), u(rng)));
  const double n = euclidean_norm(x);
  return vscale(x, 1.0 / n);
}

}  // namespace

TEST_CASE("arithmetic suite examples") {
  const CMatrix i4 = CMatrix::identity(4);
  CHECK(trace(i4).real() == 4.0);
  CHECK(trace(i4).imag() == 0.0);
  CHECK(frobenius_norm(i4) == doctest::Approx(2.0));

  const CMatrix sy = pauli_y();
  const CMatrix prod = matmul(adjoint(sy), sy);
  CHECK(frobenius_norm(sub(prod, CMatrix::identity(2))) < 1e-15);

  CMatrix a(2, 3);
  CMatrix b(2, 2);
  CHECK_THROWS_AS(add(a, b), ShapeMismatch);
  CHECK_THROWS_AS(matmul(a, a), ShapeMismatch);
}

TEST_CASE("kron examples") {
  const CMatrix k = kron(pauli_x(), CMatrix::identity(2));
  const double expect[4][4] = {
      {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      CHECK(k.re_at(r, c) == doctest::Approx(expect[r][c]));
      CHECK(k.im_at(r, c) == doctest::Approx(0.0));
    }

  const CMatrix id4 = kron(CMatrix::identity(2), CMatrix::identity(2));
  CHECK(frobenius_norm(sub(id4, CMatrix::identity(4))) == 0.0);

  // 0.5*(XX+YY+ZZ) equals SWAP - I/2
  const CMatrix hd = heisenberg_drift();
  const double hd_expect[4][4] = {{0.5, 0, 0, 0},
                                  {0, -0.5, 1, 0},
                                  {0, 1, -0.5, 0},
                                  {0, 0, 0, 0.5}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      CHECK(hd.re_at(r, c) == doctest::Approx(hd_expect[r][c]));
      CHECK(hd.im_at(r, c) == doctest::Approx(0.0));
    }
}

TEST_CASE("kron mixed-product property") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = random_cmat(rng, 2), b = random_cmat(rng, 2);
    const CMatrix c = random_cmat(rng, 2), d = random_cmat(rng, 2);
    const CMatrix lhs = matmul(kron(a, b), kron(c, d));
    const CMatrix rhs = kron(matmul(a, c), matmul(b, d));
    CHECK(frobenius_norm(sub(lhs, rhs)) < 1e-12);
  }
}

TEST_CASE("matexp examples") {
  {
    const CMatrix z4(4, 4);
    const CMatrix e = matexp(z4);
    CHECK(frobenius_norm(sub(e, CMatrix::identity(4))) < 1e-15);
  }
  {
    // exp(-i (pi/2) sigma_x) = -i sigma_x
    const CMatrix a = scale(pauli_x(), cd(0, -M_PI / 2));
    const CMatrix e = matexp(a);
    CMatrix expect(2, 2);
    expect.set(0, 1, cd(0, -1));
    expect.set(1, 0, cd(0, -1));
    CHECK(frobenius_norm(sub(e, expect)) < 1e-13);
  }
  {
    // exp(-i pi H_d) = -i I with H_d the Heisenberg drift
    const CMatrix a = scale(heisenberg_drift(), cd(0, -M_PI));
    const CMatrix e = matexp(a);
    const CMatrix expect = scale(CMatrix::identity(4), cd(0, -1));
    CHECK(frobenius_norm(sub(e, expect)) < 1e-12);
  }
}

TEST_CASE("matexp unitarity and eigendecomposition oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = trial % 2 == 0 ? 4 : 3;
    CMatrix h = random_hermitian(rng, d, 2.0);
    if (frobenius_norm(h) > 5.0) h = scale(h, 5.0 / frobenius_norm(h));
    const CMatrix u = matexp(scale(h, cd(0, -1)));

    CHECK(frobenius_norm(sub(matmul(adjoint(u), u), CMatrix::identity(d))) <
          1e-10);

    // oracle: V diag(exp(-i lambda)) V^dagger
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(h, lam, v);
    CMatrix diag(d, d);
    for (int i = 0; i < d; ++i) diag.set(i, i, std::exp(cd(0, -lam[i])));
    const CMatrix ref = matmul(matmul(v, diag), adjoint(v));
    CHECK(frobenius_norm(sub(u, ref)) < 1e-9);
  }
}

TEST_CASE("vec and unvec") {
  // vec([[1,3],[2,4]]) = (1,2,3,4) under column stacking
  CMatrix a(2, 2);
  a.set(0, 0, 1.0);
  a.set(0, 1, 3.0);
  a.set(1, 0, 2.0);
  a.set(1, 1, 4.0);
  const CVector v = vec(a);
  CHECK(v.re[0] == 1.0);
  CHECK(v.re[1] == 2.0);
  CHECK(v.re[2] == 3.0);
  CHECK(v.re[3] == 4.0);

  std::mt19937_64 rng(5);
  const CMatrix rho = random_cmat(rng, 4);
  const CMatrix back = unvec(vec(rho), 4);
  CHECK(frobenius_norm(sub(back, rho)) == 0.0);

  CVector bad(5);
  CHECK_THROWS_AS(unvec(bad, 2), ShapeMismatch);
}

TEST_CASE("vec identity vec(AXB) = (B^T kron A) vec(X)") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = random_cmat(rng, 2), x = random_cmat(rng, 2),
                  b = random_cmat(rng, 2);
    const CVector lhs = vec(matmul(matmul(a, x), b));
    const CVector rhs = matvec(kron(transpose(b), a), vec(x));
    CVector diff(4);
    for (int i = 0; i < 4; ++i) diff.set(i, lhs.at(i) - rhs.at(i));
    CHECK(euclidean_norm(diff) < 1e-12);
  }
}

TEST_CASE("hermitian_eig examples") {
  {
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(pauli_z(), lam, v);
    CHECK(lam[0] == doctest::Approx(-1.0));
    CHECK(lam[1] == doctest::Approx(1.0));
  }
  {
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(heisenberg_drift(), lam, v);
    CHECK(lam[0] == doctest::Approx(-1.5));
    CHECK(lam[1] == doctest::Approx(0.5));
    CHECK(lam[2] == doctest::Approx(0.5));
    CHECK(lam[3] == doctest::Approx(0.5));
  }
  {
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(CMatrix::identity(4), lam, v);
    for (double l : lam) CHECK(l == doctest::Approx(1.0));
  }
  {
    std::mt19937_64 rng(31);
    const CMatrix h = random_hermitian(rng, 4);
    std::vector<double> lam;
    CMatrix v;
    hermitian_eig(h, lam, v);
    CHECK(frobenius_norm(sub(matmul(adjoint(v), v), CMatrix::identity(4))) <
          1e-10);
    CMatrix diag(4, 4);
    for (int i = 0; i < 4; ++i) diag.set(i, i, lam[i]);
    CHECK(frobenius_norm(sub(matmul(matmul(v, diag), adjoint(v)), h)) < 1e-10);
    CHECK_THROWS_AS(hermitian_eig(random_cmat(rng, 3), lam, v), NotHermitian);
  }
}

TEST_CASE("uhlmann fidelity") {
  std::mt19937_64 rng(47);
  {
    const CVector psi = random_unit(rng, 4);
    const CMatrix rho = outer(psi, psi);
    CHECK(uhlmann_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    CVector e00(4), e10(4);
    e00.set(0, 1.0);
    e10.set(2, 1.0);
    CHECK(uhlmann_fidelity(outer(e00, e00), outer(e10, e10)) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const CVector psi = random_unit(rng, 4);
    const CVector phi = random_unit(rng, 4);
    const double f = uhlmann_fidelity(outer(psi, psi), outer(phi, phi));
    const double overlap = std::norm(inner(psi, phi));
    CHECK(std::abs(f - overlap) < 1e-10);
  }
  CHECK_THROWS_AS(
      uhlmann_fidelity(CMatrix::identity(4), scale(CMatrix::identity(4), 0.25)),
      InvalidDensityMatrix);
}

TEST_CASE("differentiable matexp agrees with plain and has correct gradient") {
  std::mt19937_64 rng(61);
  const CMatrix h = random_hermitian(rng, 4, 0.8);
  const CMatrix a = scale(h, cd(0, -1));

  tape::DiffGraph g;
  const tape::NodeId an = cx::graph::constant_cmat(g, a);
  const tape::NodeId en = cx::graph::matexp(g, an, 4, 12, 3);
  const CMatrix eg = cx::graph::unpack_cmat(g.value(en), 4);
  const CMatrix ep = matexp(a, 12, 3);
  CHECK(frobenius_norm(sub(eg, ep)) < 1e-13);

  // d/dtheta tr(exp(theta*A)) at theta=0 equals tr(A)
  tape::DiffGraph g2;
  const tape::NodeId theta = g2.input(0.0);
  const tape::NodeId ac = cx::graph::constant_cmat(g2, a);
  const tape::NodeId ta = g2.mul(theta, ac);
  const tape::NodeId e = cx::graph::matexp(g2, ta, 4, 12, 2);
  const tape::NodeId tr = g2.ctrace(e, 4);
  const tape::NodeId root = g2.slice(tr, 0, 1);
  g2.backward(root);
  const double expect = trace(a).real();
  CHECK(std::abs(g2.adjoint_scalar(theta) - expect) /
            std::max(1.0, std::abs(expect)) <
        1e-6);
}
