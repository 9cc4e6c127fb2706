#include <doctest.h>

#include <algorithm>

#include "ddsim/spinbath.hpp"

using namespace ddsim;

namespace {

std::vector<double> sorted_spectrum(const CMatrix& m)
{
    const HermitianEigen e(m);
    std::vector<double> v(e.eigenvalues().data(), e.eigenvalues().data() + e.dim());
    std::sort(v.begin(), v.end());
    return v;
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).norm(); }

} // namespace

TEST_CASE("pair interaction spectra")
{
    // sigma.sigma: singlet -3, triplet +1
    const auto heis = sorted_spectrum(heisenberg_pair());
    CHECK(heis[0] == doctest::Approx(-3.0));
    for (int k = 1; k < 4; ++k) CHECK(heis[std::size_t(k)] == doctest::Approx(1.0));

    // 3 sz sz - sigma.sigma: |T0> -> -4, singlet -> 0, |T+-> -> 2
    const auto dip = sorted_spectrum(dipolar_pair());
    CHECK(dip[0] == doctest::Approx(-4.0));
    CHECK(dip[1] == doctest::Approx(0.0));
    CHECK(dip[2] == doctest::Approx(2.0));
    CHECK(dip[3] == doctest::Approx(2.0));
}

TEST_CASE("site operators")
{
    const CMatrix z1 = site_operator(pauli::z(), 1, 3);
    CHECK(z1.rows() == 8);
    CHECK(z1.trace().real() == doctest::Approx(0.0));
    CHECK((qubit_z(8) - site_operator(pauli::z(), 0, 3)).norm() == doctest::Approx(0.0));
    CHECK((qubit_x(8) - site_operator(pauli::x(), 0, 3)).norm() == doctest::Approx(0.0));
    // qubit is the most significant factor
    CHECK(qubit_z(8)(0, 0) == Complex(1));
    CHECK(qubit_z(8)(4, 4) == Complex(-1));
    CHECK(commutator_norm(site_operator(pauli::x(), 0, 3), site_operator(pauli::z(), 2, 3)) < 1e-14);
}

TEST_CASE("chain couplings and dimensions")
{
    BathSpec spec;
    const auto lam = spec.couplings();
    REQUIRE(lam.size() == 3);
    CHECK(lam[0] == 1.0);
    CHECK(lam[1] == 0.0);
    CHECK(lam[2] == 0.0);
    CHECK(spec.coupled_spins() == 1);
    CHECK(spec.omega_b() == 10.0);

    const HamiltonianPair h = build_chain(spec);
    CHECK(h.dim == 16);
    CHECK(h.bath_dim() == 8);
    CHECK(h.bath_spins == 3);
    CHECK((h.h - h.b0_full - h.bz_full).norm() < 1e-14);
    CHECK((h.bz_full - kron(pauli::z(), site_operator(pauli::z(), 0, 3))).norm() < 1e-14);
}

TEST_CASE("central spin couplings are evenly spaced and sum to zero")
{
    BathSpec spec;
    spec.topology = Topology::CentralSpin;
    spec.spins = 8;
    const auto lam = spec.couplings();
    REQUIRE(lam.size() == 8);
    double sum = 0.0;
    for (int i = 1; i <= 8; ++i) {
        CHECK(lam[std::size_t(i - 1)] == doctest::Approx((2.0 * i - 9.0) / 7.0));
        sum += lam[std::size_t(i - 1)];
    }
    CHECK(sum == doctest::Approx(0.0));
    CHECK(lam.front() == -1.0);
    CHECK(lam.back() == 1.0);
    CHECK(spec.coupled_spins() == 8);
}

TEST_CASE("model invariants")
{
    for (Topology topo : {Topology::Chain, Topology::CentralSpin}) {
        for (int m : {2, 3, 4}) {
            BathSpec spec;
            spec.topology = topo;
            spec.spins = m;
            const HamiltonianPair h = build_model(spec);
            CAPTURE(m);
            CHECK(is_hermitian(h.h));
            // pure dephasing: the qubit sigma_z is conserved
            CHECK(commutator_norm(h.h, qubit_z(h.dim)) < 1e-12);
            // B0 acts on the bath only
            CHECK(commutator_norm(h.b0_full, qubit_x(h.dim)) < 1e-12);
            // flipping every spin leaves H unchanged
            CHECK(commutator_norm(h.h, global_flip(m + 1)) < 1e-11);
            CHECK(std::abs(h.b0_full.trace()) < 1e-11);
            CHECK(std::abs(h.bz_full.trace()) < 1e-11);
        }
    }
}

TEST_CASE("chain closure adds exactly the wrap-around bond")
{
    const auto bond = [](int a, int b) {
        CMatrix sum = CMatrix::Zero(8, 8);
        for (const CMatrix& p : {pauli::x(), pauli::y(), pauli::z()})
            sum += site_operator(p, a, 3) * site_operator(p, b, 3);
        return sum;
    };
    BathSpec spec;
    const HamiltonianPair periodic = build_chain(spec);
    spec.closure = ChainClosure::Open;
    const HamiltonianPair open = build_chain(spec);
    const CMatrix id2 = CMatrix::Identity(2, 2);
    CHECK((open.b0_full - spec.omega_b() * kron(id2, (bond(0, 1) + bond(1, 2)).eval())).norm() < 1e-11);
    CHECK((periodic.b0_full - open.b0_full - spec.omega_b() * kron(id2, bond(2, 0))).norm() < 1e-11);
}

TEST_CASE("two-spin periodic chain doubles its single bond")
{
    BathSpec spec;
    spec.spins = 2;
    const HamiltonianPair h = build_chain(spec);
    const CMatrix expect = 2.0 * spec.omega_b() * kron(CMatrix::Identity(2, 2), heisenberg_pair());
    CHECK((h.b0_full - expect).norm() < 1e-11);
}

TEST_CASE("qubit site selects the coupled chain spin")
{
    BathSpec spec;
    spec.qubit_site = 2;
    const auto lam = spec.couplings();
    CHECK(lam[0] == 0.0);
    CHECK(lam[1] == 1.0);
    spec.qubit_site = 4;
    CHECK_THROWS_AS(build_chain(spec), ModelError);
}

TEST_CASE("model errors")
{
    BathSpec spec;
    spec.spins = 1;
    CHECK_THROWS_AS(build_model(spec), ModelError);
    spec.spins = 3;
    spec.lambda = 0.0;
    CHECK_THROWS_AS(build_model(spec), ModelError);
    spec.lambda = 1.0;
    spec.spins = 12;
    CHECK_THROWS_AS(build_model(spec), DimensionError);
    CHECK_THROWS_AS(topology_from_string("ring"), std::invalid_argument);
    CHECK(topology_from_string(to_string(Topology::CentralSpin)) == Topology::CentralSpin);
}

TEST_CASE("energy scale is linear in lambda")
{
    BathSpec a;
    BathSpec b;
    b.lambda = 2.0;
    const HamiltonianPair ha = build_model(a), hb = build_model(b);
    CHECK((hb.h - 2.0 * ha.h).norm() < 1e-11);
}
