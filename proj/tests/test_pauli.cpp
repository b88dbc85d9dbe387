#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "subpen/linalg.hpp"
#include "subpen/pauli.hpp"

using namespace subpen;

namespace {

PauliOperator random_pauli(std::mt19937_64& rng, int n) {
    uint64_t mask = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    return PauliOperator(n, rng() & mask, rng() & mask, static_cast<int>(rng() % 4));
}

MatrixXcd kron_oracle(const PauliOperator& p) {
    // Independent dense route: explicit 2x2 factors, folded left to right.
    MatrixXcd x(2, 2), y(2, 2), z(2, 2), id(2, 2);
    x << 0, 1, 1, 0;
    y << 0, complexd(0, -1), complexd(0, 1), 0;
    z << 1, 0, 0, -1;
    id << 1, 0, 0, 1;
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (int q = 1; q <= p.num_qubits; ++q) {
        switch (p.letter(q)) {
            case 'X': m = kron(m, x); break;
            case 'Y': m = kron(m, y); break;
            case 'Z': m = kron(m, z); break;
            default: m = kron(m, id); break;
        }
    }
    return p.phase() * m;
}

}  // namespace

TEST_CASE("single-qubit products") {
    PauliOperator X = parse_pauli("X", 1), Z = parse_pauli("Z", 1);
    CHECK(multiply(X, X) == PauliOperator::identity(1));
    // X * Z = -i Y
    PauliOperator xz = multiply(X, Z);
    CHECK(xz.letter(1) == 'Y');
    CHECK(xz.phase_exponent == 3);
    // (X1 X2)(Z1 Z2) = -Y1 Y2
    PauliOperator p = multiply(parse_pauli("XX"), parse_pauli("ZZ"));
    CHECK(p == parse_pauli("-YY"));
    CHECK(p.phase_exponent == 2);
}

TEST_CASE("commutation basics") {
    CHECK(commutes(parse_pauli("XXXX"), parse_pauli("ZZZZ")));
    CHECK_FALSE(commutes(parse_pauli("X", 1), parse_pauli("Z", 1)));
    CHECK_FALSE(commutes(parse_pauli("IY"), parse_pauli("XX")));
    CHECK_THROWS(commutes(parse_pauli("X", 1), parse_pauli("XX")));
}

TEST_CASE("weight") {
    CHECK(weight(PauliOperator::identity(8)) == 0);
    CHECK(weight(parse_pauli("X1 X8", 8)) == 2);
    CHECK(weight(parse_pauli("Y1 Z3 X4", 4)) == 3);
}

TEST_CASE("dense realization matches Kronecker oracle") {
    MatrixXcd z = to_dense(parse_pauli("Z", 1));
    CHECK(z(0, 0) == complexd(1, 0));
    CHECK(z(1, 1) == complexd(-1, 0));
    MatrixXcd x = to_dense(parse_pauli("X", 1));
    CHECK(x(0, 1) == complexd(1, 0));
    CHECK(x(1, 0) == complexd(1, 0));
    CHECK(x(0, 0) == complexd(0, 0));

    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4);
        PauliOperator p = random_pauli(rng, n);
        CHECK((to_dense(p) - kron_oracle(p)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("multiplication is a dense homomorphism") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        PauliOperator p = random_pauli(rng, n), q = random_pauli(rng, n);
        MatrixXcd lhs = to_dense(multiply(p, q));
        MatrixXcd rhs = to_dense(p) * to_dense(q);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("group axioms on random triples") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(rng() % 16);
        PauliOperator p = random_pauli(rng, n), q = random_pauli(rng, n), r = random_pauli(rng, n);
        CHECK(multiply(multiply(p, q), r) == multiply(p, multiply(q, r)));
        CHECK(multiply(p, PauliOperator::identity(n)) == p);
        PauliOperator sq = multiply(p, p);
        CHECK(sq.is_identity_mask());
        CHECK((sq.phase_exponent == 0 || sq.phase_exponent == 2));
    }
}

TEST_CASE("symplectic commutation agrees with dense commutator") {
    // exhaustive for n <= 2
    for (int n = 1; n <= 2; ++n) {
        int lim = 1 << n;
        for (int xa = 0; xa < lim; ++xa)
            for (int za = 0; za < lim; ++za)
                for (int xb = 0; xb < lim; ++xb)
                    for (int zb = 0; zb < lim; ++zb) {
                        PauliOperator a(n, xa, za), b(n, xb, zb);
                        MatrixXcd comm = to_dense(a) * to_dense(b) - to_dense(b) * to_dense(a);
                        CHECK(commutes(a, b) == (comm.cwiseAbs().maxCoeff() < 1e-14));
                    }
    }
    // random up to n = 6
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 3 + static_cast<int>(rng() % 4);
        PauliOperator a = random_pauli(rng, n), b = random_pauli(rng, n);
        MatrixXcd comm = to_dense(a) * to_dense(b) - to_dense(b) * to_dense(a);
        CHECK(commutes(a, b) == (comm.cwiseAbs().maxCoeff() < 1e-14));
    }
}

TEST_CASE("text forms round-trip exactly") {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng() % 12);
        PauliOperator p = random_pauli(rng, n);
        CHECK(parse_pauli(to_dense_string(p)) == p);
        CHECK(parse_pauli(to_sparse_string(p), n) == p);
    }
    CHECK(to_sparse_string(parse_pauli("X1 Z3 Y4", 4)) == "X1 Z3 Y4");
    CHECK(to_dense_string(parse_pauli("-iXIZY")) == "-iXIZY");
    CHECK(to_sparse_string(PauliOperator::identity(3)) == "I");
    CHECK(parse_pauli("I", 3) == PauliOperator::identity(3));
    CHECK_THROWS(parse_pauli("X1 X1", 4));
    CHECK_THROWS(parse_pauli("X9", 4));
    CHECK_THROWS(parse_pauli("Q", 1));
}

TEST_CASE("to_dense enforces the dense limit") {
    CHECK_THROWS(to_dense(PauliOperator::identity(15)));
}
