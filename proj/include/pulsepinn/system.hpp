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
#ifndef PULSEPINN_SYSTEM_HPP
#define PULSEPINN_SYSTEM_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pulsepinn/cmat.hpp"

namespace pulsepinn::qsys {

// Basis ordering |00>, |01>, |10>, |11>; qubit 1 is the left tensor factor.

cx::CMatrix pauli_x();
cx::CMatrix pauli_y();
cx::CMatrix pauli_z();
cx::CMatrix identity2();

// Two qubits with constant isotropic Heisenberg coupling and transverse x/y
// drives on each qubit. S_I = I/2 scales the single-qubit controls.
struct SystemSpec {
  static constexpr int kNumControls = 4;
  cx::CMatrix drift;                        // 0.5*(XX + YY + ZZ)
  std::array<cx::CMatrix, 4> controls;      // sx(x)S_I, sy(x)S_I, S_I(x)sx, S_I(x)sy
  double gamma_abs = 0.0;
  double gamma_em = 0.0;
};

SystemSpec build_system(double gamma_abs = 0.0, double gamma_em = 0.0);

// H(t) = H_d + sum_j u_j H_c^(j)
cx::CMatrix total_hamiltonian(const SystemSpec& sys, std::span<const double> u);

// C1 = sqrt(g_abs) (|e><g| x I), C2 = sqrt(g_em) (|g><e| x I),
// C3 = sqrt(g_abs) (I x |e><g|), C4 = sqrt(g_em) (I x |g><e|).
std::vector<cx::CMatrix> build_collapse_ops(double gamma_abs, double gamma_em);

// Column-stacking Liouvillian for any dimension:
//   L = -i(I(x)H - H^T(x)I) + sum_a [conj(C)(x)C - I(x)(C^dag C)/2
//                                     - (C^dag C)^T(x)I/2]
cx::CMatrix build_liouvillian(const cx::CMatrix& h,
                              const std::vector<cx::CMatrix>& collapse);

// The 16 products sigma_mu (x) sigma_nu, mu-major, sigma_0 = I.
std::vector<cx::CMatrix> pauli_basis_2q();

struct GateTarget {
  std::string name;
  double theta = 0.0;
  cx::CMatrix matrix;     // 4x4 unitary
  cx::CVector default_x0; // unit norm
};

// Names: "cnot", "swap", "qft2", "hh", "crz", "cp" (theta applies to crz/cp).
GateTarget gate_target(const std::string& name, double theta);

}  // namespace pulsepinn::qsys

#endif  // PULSEPINN_SYSTEM_HPP
