// Pure-dephasing qubit + spin-bath Hamiltonians
//
//   H = omega_b B0 + sigma_z^(0) sum_i lambda_i sigma_z^(i),   omega_b = alpha * lambda
//
// Tensor order: qubit first (most significant index), then bath spins 1..M.
// Pauli matrices have eigenvalues +-1; all couplings carry the energy scale.

#pragma once

#include <string>
#include <vector>

#include "ddsim/linalg.hpp"

namespace ddsim {

enum class Topology { Chain, CentralSpin };
enum class ChainClosure { Periodic, Open };

struct BathSpec {
    Topology topology{Topology::Chain};
    int spins{3};        // M, number of bath spins
    double lambda{1.0};  // coupling energy scale
    double alpha{10.0};  // bath rapidity, omega_b = alpha * lambda
    ChainClosure closure{ChainClosure::Periodic};
    int qubit_site{1};   // chain site the qubit couples to (1-based)

    double omega_b() const { return alpha * lambda; }
    // lambda_i for i = 1..M (zero for uncoupled chain sites)
    std::vector<double> couplings() const;
    // N_s, the number of bath spins coupled to the qubit
    int coupled_spins() const { return topology == Topology::Chain ? 1 : spins; }
};

struct HamiltonianPair {
    CMatrix b0_full;  // omega_b B0, identity on the qubit
    CMatrix bz_full;  // sigma_z^(0) (x) sum_i lambda_i sigma_z^(i)
    CMatrix h;        // b0_full + bz_full
    Index dim{0};     // 2^(M+1)
    int bath_spins{0};

    Index bath_dim() const { return dim / 2; }
};

// sigma^(site) embedded in an n_spins register; site 0 is the qubit.
CMatrix site_operator(const CMatrix& op, int site, int n_spins);

// sigma_x on the qubit, identity on the bath.
CMatrix qubit_x(Index dim);
// sigma_z on the qubit, identity on the bath.
CMatrix qubit_z(Index dim);
// Product of sigma_x over every spin including the qubit.
CMatrix global_flip(int n_spins);

HamiltonianPair build_chain(const BathSpec& spec);
HamiltonianPair build_central_spin(const BathSpec& spec);
// Dispatch on spec.topology.
HamiltonianPair build_model(const BathSpec& spec);

// Dipolar pair interaction: 3 sz sz - sigma.sigma (4x4, no scale)
CMatrix dipolar_pair();
// sigma.sigma for a pair (4x4)
CMatrix heisenberg_pair();

std::string to_string(Topology topology);
Topology topology_from_string(const std::string& name);

} // namespace ddsim
