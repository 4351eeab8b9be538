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
#include "pulsepinn/system.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace pulsepinn::qsys {

using cx::CMatrix;
using cx::CVector;
using cd = std::complex<double>;

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

CMatrix identity2() { return CMatrix::identity(2); }

SystemSpec build_system(double gamma_abs, double gamma_em) {
  if (gamma_abs < 0.0 || gamma_em < 0.0)
    throw NegativeRate("collapse rates must be nonnegative");
  SystemSpec sys;
  const CMatrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  const CMatrix si = cx::scale(identity2(), 0.5);
  sys.drift = cx::scale(
      cx::add(cx::add(cx::kron(sx, sx), cx::kron(sy, sy)), cx::kron(sz, sz)),
      0.5);
  sys.controls[0] = cx::kron(sx, si);
  sys.controls[1] = cx::kron(sy, si);
  sys.controls[2] = cx::kron(si, sx);
  sys.controls[3] = cx::kron(si, sy);
  sys.gamma_abs = gamma_abs;
  sys.gamma_em = gamma_em;
  return sys;
}

CMatrix total_hamiltonian(const SystemSpec& sys, std::span<const double> u) {
  if (u.size() != SystemSpec::kNumControls)
    throw ShapeMismatch("total_hamiltonian expects 4 control amplitudes");
  CMatrix h = sys.drift;
  for (int j = 0; j < SystemSpec::kNumControls; ++j)
    h = cx::add(h, cx::scale(sys.controls[j], u[j]));
  return h;
}

std::vector<CMatrix> build_collapse_ops(double gamma_abs, double gamma_em) {
  if (gamma_abs < 0.0 || gamma_em < 0.0)
    throw NegativeRate("collapse rates must be nonnegative");
  CMatrix sigma_ge(2, 2);  // |g><e|
  sigma_ge.set(0, 1, 1.0);
  CMatrix sigma_eg(2, 2);  // |e><g|
  sigma_eg.set(1, 0, 1.0);
  const CMatrix id = identity2();
  std::vector<CMatrix> c;
  c.push_back(cx::scale(cx::kron(sigma_eg, id), std::sqrt(gamma_abs)));
  c.push_back(cx::scale(cx::kron(sigma_ge, id), std::sqrt(gamma_em)));
  c.push_back(cx::scale(cx::kron(id, sigma_eg), std::sqrt(gamma_abs)));
  c.push_back(cx::scale(cx::kron(id, sigma_ge), std::sqrt(gamma_em)));
  return c;
}

CMatrix build_liouvillian(const cx::CMatrix& h,
                          const std::vector<cx::CMatrix>& collapse) {
  const int d = h.rows;
  if (h.cols != d) throw ShapeMismatch("build_liouvillian: H not square");
  const CMatrix id = CMatrix::identity(d);
  CMatrix lv = cx::scale(cx::sub(cx::kron(id, h), cx::kron(cx::transpose(h), id)),
                         cd(0, -1));
  for (const CMatrix& c : collapse) {
    if (c.rows != d || c.cols != d)
      throw ShapeMismatch("build_liouvillian: collapse operator shape mismatch");
    const CMatrix cdc = cx::matmul(cx::adjoint(c), c);
    lv = cx::add(lv, cx::kron(cx::conjugate(c), c));
    lv = cx::sub(lv, cx::scale(cx::kron(id, cdc), 0.5));
    lv = cx::sub(lv, cx::scale(cx::kron(cx::transpose(cdc), id), 0.5));
  }
  return lv;
}

std::vector<CMatrix> pauli_basis_2q() {
  const std::array<CMatrix, 4> sigma = {CMatrix::identity(2), pauli_x(),
                                        pauli_y(), pauli_z()};
  std::vector<CMatrix> basis;
  basis.reserve(16);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) basis.push_back(cx::kron(sigma[mu], sigma[nu]));
  return basis;
}

GateTarget gate_target(const std::string& name, double theta) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });

  GateTarget t;
  t.name = key;
  t.theta = theta;
  t.matrix = CMatrix(4, 4);
  t.default_x0 = CVector(4);

  if (key == "cnot") {
    // control = qubit 1 (left factor)
    t.matrix.set(0, 0, 1.0);
    t.matrix.set(1, 1, 1.0);
    t.matrix.set(3, 2, 1.0);
    t.matrix.set(2, 3, 1.0);
    t.default_x0.set(2, 1.0);  // |10>
  } else if (key == "swap") {
    t.matrix.set(0, 0, 1.0);
    t.matrix.set(2, 1, 1.0);
    t.matrix.set(1, 2, 1.0);
    t.matrix.set(3, 3, 1.0);
    t.default_x0.set(1, 1.0);  // |01>
  } else if (key == "qft2") {
    const cd omega(0, 1);
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        t.matrix.set(j, k, 0.5 * std::pow(omega, j * k));
    t.default_x0.set(1, 1.0);  // |01>
  } else if (key == "hh") {
    CMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h.set(0, 0, s);
    h.set(0, 1, s);
    h.set(1, 0, s);
    h.set(1, 1, -s);
    t.matrix = cx::kron(h, h);
    t.default_x0.set(0, 1.0);  // |00>
  } else if (key == "crz") {
    t.matrix.set(0, 0, 1.0);
    t.matrix.set(1, 1, 1.0);
    t.matrix.set(2, 2, std::exp(cd(0, -theta / 2)));
    t.matrix.set(3, 3, std::exp(cd(0, theta / 2)));
    t.default_x0.set(2, 1.0);  // |10>
  } else if (key == "cp") {
    t.matrix.set(0, 0, 1.0);
    t.matrix.set(1, 1, 1.0);
    t.matrix.set(2, 2, 1.0);
    t.matrix.set(3, 3, std::exp(cd(0, theta)));
    t.default_x0.set(2, 1.0);  // |10>
  } else {
    throw UnknownGate("unknown gate target: " + name);
  }
  return t;
}

}  // namespace pulsepinn::qsys
