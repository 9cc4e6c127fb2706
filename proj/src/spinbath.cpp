// Chain and central-spin model builders

#include "ddsim/spinbath.hpp"

#include <algorithm>
#include <cctype>

namespace ddsim {

namespace {

CMatrix embed_pair(const CMatrix& a, int site_a, const CMatrix& b, int site_b, int n_spins)
{
    return site_operator(a, site_a, n_spins) * site_operator(b, site_b, n_spins);
}

// sigma^(a) . sigma^(b)
CMatrix heisenberg_bond(int a, int b, int n_spins)
{
    return embed_pair(pauli::x(), a, pauli::x(), b, n_spins) +
           embed_pair(pauli::y(), a, pauli::y(), b, n_spins) +
           embed_pair(pauli::z(), a, pauli::z(), b, n_spins);
}

void check_size(const BathSpec& spec)
{
    if (spec.spins < 2) {
        throw ModelError("bath needs at least 2 spins, got M=" + std::to_string(spec.spins));
    }
    if (spec.lambda <= 0.0) {
        throw ModelError("lambda must be positive");
    }
    if (Index(2) << spec.spins > kMaxDimension) {
        throw DimensionError("M=" + std::to_string(spec.spins) + " exceeds the dimension cap");
    }
}

HamiltonianPair assemble(const CMatrix& b0, const std::vector<double>& lambdas, const BathSpec& spec)
{
    const int n = spec.spins + 1;
    HamiltonianPair pair;
    pair.dim = Index(1) << n;
    pair.bath_spins = spec.spins;
    pair.b0_full = spec.omega_b() * b0;
    pair.bz_full = CMatrix::Zero(pair.dim, pair.dim);
    const CMatrix z0 = site_operator(pauli::z(), 0, n);
    for (int i = 1; i <= spec.spins; ++i) {
        if (lambdas[i - 1] != 0.0) {
            pair.bz_full += lambdas[i - 1] * (z0 * site_operator(pauli::z(), i, n));
        }
    }
    pair.h = pair.b0_full + pair.bz_full;
    return pair;
}

} // namespace

std::vector<double> BathSpec::couplings() const
{
    std::vector<double> out(static_cast<std::size_t>(std::max(spins, 0)), 0.0);
    if (topology == Topology::Chain) {
        if (qubit_site >= 1 && qubit_site <= spins) out[qubit_site - 1] = lambda;
        return out;
    }
    for (int i = 1; i <= spins; ++i) {
        out[i - 1] = lambda * double(2 * i - spins - 1) / double(spins - 1);
    }
    return out;
}

CMatrix site_operator(const CMatrix& op, int site, int n_spins)
{
    if (site < 0 || site >= n_spins) {
        throw DimensionError("site_operator: site " + std::to_string(site) + " out of range");
    }
    CMatrix out = CMatrix::Identity(1, 1);
    for (int k = 0; k < n_spins; ++k) {
        out = kron(out, k == site ? op : pauli::identity());
    }
    return out;
}

CMatrix qubit_x(Index dim)
{
    return kron(pauli::x(), CMatrix::Identity(dim / 2, dim / 2));
}

CMatrix qubit_z(Index dim)
{
    return kron(pauli::z(), CMatrix::Identity(dim / 2, dim / 2));
}

CMatrix global_flip(int n_spins)
{
    CMatrix out = CMatrix::Identity(1, 1);
    for (int k = 0; k < n_spins; ++k) out = kron(out, pauli::x());
    return out;
}

CMatrix heisenberg_pair()
{
    return kron(pauli::x(), pauli::x()) + kron(pauli::y(), pauli::y()) + kron(pauli::z(), pauli::z());
}

CMatrix dipolar_pair()
{
    return 3.0 * kron(pauli::z(), pauli::z()) - heisenberg_pair();
}

HamiltonianPair build_chain(const BathSpec& spec)
{
    if (spec.topology != Topology::Chain) throw ContractError("build_chain: topology is not Chain");
    check_size(spec);
    if (spec.qubit_site < 1 || spec.qubit_site > spec.spins) {
        throw ModelError("qubit_site must lie in 1..M");
    }
    const int n = spec.spins + 1;
    const Index dim = Index(1) << n;
    CMatrix b0 = CMatrix::Zero(dim, dim);
    // Bond i connects spin i and i+1; the periodic closure identifies M+1 with 1,
    // so for M=2 both bonds join the same pair.
    const int bonds = spec.closure == ChainClosure::Periodic ? spec.spins : spec.spins - 1;
    for (int i = 1; i <= bonds; ++i) {
        const int j = i % spec.spins + 1;
        b0 += heisenberg_bond(i, j, n);
    }
    return assemble(b0, spec.couplings(), spec);
}

HamiltonianPair build_central_spin(const BathSpec& spec)
{
    if (spec.topology != Topology::CentralSpin) {
        throw ContractError("build_central_spin: topology is not CentralSpin");
    }
    check_size(spec);
    const int n = spec.spins + 1;
    const Index dim = Index(1) << n;
    CMatrix b0 = CMatrix::Zero(dim, dim);
    for (int i = 1; i <= spec.spins; ++i) {
        for (int j = 1; j < i; ++j) {
            b0 += 3.0 * embed_pair(pauli::z(), i, pauli::z(), j, n) - heisenberg_bond(i, j, n);
        }
    }
    return assemble(b0, spec.couplings(), spec);
}

HamiltonianPair build_model(const BathSpec& spec)
{
    return spec.topology == Topology::Chain ? build_chain(spec) : build_central_spin(spec);
}

std::string to_string(Topology topology)
{
    return topology == Topology::Chain ? "chain" : "central_spin";
}

Topology topology_from_string(const std::string& name)
{
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    if (key == "chain") return Topology::Chain;
    if (key == "central_spin" || key == "centralspin" || key == "central-spin") return Topology::CentralSpin;
    throw ConfigError("unknown bath topology '" + name + "'");
}

} // namespace ddsim
