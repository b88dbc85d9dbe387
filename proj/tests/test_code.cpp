#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "subpen/code.hpp"
#include "subpen/encoding.hpp"

using namespace subpen;

namespace {

// Dressed distance by brute force: minimum weight of a Pauli that commutes
// with every stabilizer but lies outside the gauge group span.
int distance_oracle(const SubsystemCode& code) {
    int n = code.num_physical;
    REQUIRE(n <= 10);
    std::vector<uint64_t> span;
    for (const auto& g : code.gauge_gens) span.push_back(symplectic_vector(g));
    for (const auto& st : code.stabilizer_gens) span.push_back(symplectic_vector(st));
    int best = n + 1;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
        for (uint64_t z = 0; z < (uint64_t{1} << n); ++z) {
            if (!(x | z)) continue;
            PauliOperator p(n, x, z, 0);
            bool central = true;
            for (const auto& st : code.stabilizer_gens)
                if (!commutes(st, p)) { central = false; break; }
            if (!central) continue;
            if (f2_in_span(span, 2 * n, symplectic_vector(p))) continue;
            best = std::min(best, weight(p));
        }
    return best;
}

std::set<uint64_t> as_set(const std::vector<PauliOperator>& v) {
    std::set<uint64_t> s;
    for (const auto& p : v) s.insert(symplectic_vector(p));
    return s;
}

void check_group_structure(const SubsystemCode& code) {
    int n = code.num_physical;
    REQUIRE(code.s() + code.r() + code.k() == n);
    for (const auto& st : code.stabilizer_gens) {
        for (const auto& g : code.gauge_gens) REQUIRE(commutes(st, g));
        for (const auto& st2 : code.stabilizer_gens) REQUIRE(commutes(st, st2));
        for (const auto& [x, z] : code.bare_logical_pairs) {
            REQUIRE(commutes(st, x));
            REQUIRE(commutes(st, z));
        }
    }
    // stabilizers lie in the gauge span
    std::vector<uint64_t> gs;
    for (const auto& g : code.gauge_gens) gs.push_back(symplectic_vector(g));
    for (const auto& st : code.stabilizer_gens)
        REQUIRE(f2_in_span(gs, 2 * n, symplectic_vector(st)));
    // logicals: commute with the whole gauge group, canonical anticommutation
    for (int i = 0; i < code.k(); ++i) {
        const auto& [xi, zi] = code.bare_logical_pairs[i];
        for (const auto& g : code.gauge_gens) {
            REQUIRE(commutes(xi, g));
            REQUIRE(commutes(zi, g));
        }
        REQUIRE_FALSE(commutes(xi, zi));
        for (int j = 0; j < code.k(); ++j) {
            if (j == i) continue;
            const auto& [xj, zj] = code.bare_logical_pairs[j];
            REQUIRE(commutes(xi, xj));
            REQUIRE(commutes(xi, zj));
            REQUIRE(commutes(zi, zj));
        }
    }
    // gauge pairs: hyperbolic within the pair, commuting across pairs
    for (int i = 0; i < code.r(); ++i) {
        const auto& [xi, zi] = code.gauge_pairs[i];
        REQUIRE_FALSE(commutes(xi, zi));
        for (int j = 0; j < code.r(); ++j) {
            if (j == i) continue;
            const auto& [xj, zj] = code.gauge_pairs[j];
            REQUIRE(commutes(xi, xj));
            REQUIRE(commutes(xi, zj));
            REQUIRE(commutes(zi, zj));
        }
        for (const auto& st : code.stabilizer_gens) {
            REQUIRE(commutes(xi, st));
            REQUIRE(commutes(zi, st));
        }
        for (const auto& [xl, zl] : code.bare_logical_pairs) {
            REQUIRE(commutes(xi, xl));
            REQUIRE(commutes(xi, zl));
            REQUIRE(commutes(zi, xl));
            REQUIRE(commutes(zi, zl));
        }
    }
}

BinaryMatrix cyclic_band_matrix(int a) {
    BinaryMatrix m(a, a);
    for (int i = 0; i < a; ++i) {
        m.set(i, i, true);
        m.set(i, (i + 1) % a, true);
    }
    return m;
}

}  // namespace

TEST_CASE("four-qubit code from the all-ones 2x2 matrix") {
    SubsystemCode c = code_from_a_matrix(BinaryMatrix::parse("11\n11"));
    CHECK(c.params == CodeParams{4, 1, 2});
    check_group_structure(c);
    CHECK(distance_oracle(c) == 2);
    // stabilizer span must match {XXXX, ZZZZ}
    std::vector<uint64_t> sref = {symplectic_vector(parse_pauli("XXXX")),
                                  symplectic_vector(parse_pauli("ZZZZ"))};
    REQUIRE(c.stabilizer_gens.size() == 2);
    for (const auto& st : c.stabilizer_gens)
        CHECK(f2_in_span(sref, 8, symplectic_vector(st)));
}

TEST_CASE("builtin four-qubit code") {
    SubsystemCode c = builtin_412();
    check_group_structure(c);
    CHECK(c.params == CodeParams{4, 1, 2});
    CHECK(distance_oracle(c) == 2);
    // same gauge span as the generic construction
    SubsystemCode g = code_from_a_matrix(BinaryMatrix::parse("11\n11"));
    std::vector<uint64_t> span;
    for (const auto& p : g.gauge_gens) span.push_back(symplectic_vector(p));
    for (const auto& p : c.gauge_gens)
        CHECK(f2_in_span(span, 8, symplectic_vector(p)));
}

TEST_CASE("builtin eight-qubit code") {
    SubsystemCode c = builtin_832();
    check_group_structure(c);
    CHECK(c.params == CodeParams{8, 3, 2});
    CHECK(distance_oracle(c) == 2);
    SubsystemCode g = code_from_a_matrix(cyclic_band_matrix(4));
    CHECK(g.params == CodeParams{8, 3, 2});
    check_group_structure(g);
    // identical gauge generator sets after relabelling: the builtin uses the
    // chain ordering, so compare as unordered sets of symplectic vectors with
    // the generic code's own generators mapped through its geometry
    CHECK(as_set(builtin_chain(3).gauge_gens) == as_set(c.gauge_gens));
}

TEST_CASE("protected chain codes") {
    for (int N = 2; N <= 6; ++N) {
        SubsystemCode c = builtin_chain(N);
        CHECK(c.params == CodeParams{2 * N + 2, N, 2});
        check_group_structure(c);
        if (N <= 4) CHECK(distance_oracle(c) == 2);
        SubsystemCode g = code_from_a_matrix(cyclic_band_matrix(N + 1));
        CHECK(g.params == c.params);
    }
}

TEST_CASE("codespace projector") {
    SubsystemCode c = builtin_412();
    MatrixXcd p = codespace_projector(c);
    CHECK(std::abs(p.trace().real() - 4.0) < 1e-12);  // 2^(n-s)
    CHECK(spectral_norm(p * p - p) < 1e-12);
    for (const auto& st : c.stabilizer_gens)
        CHECK(spectral_norm(to_dense(st) * p - p) < 1e-12);
}

TEST_CASE("detectability classification on the four-qubit code") {
    SubsystemCode c = builtin_412();
    // every weight-1 Pauli anticommutes with a stabilizer
    for (int q = 1; q <= 4; ++q)
        for (char l : {'X', 'Y', 'Z'}) {
            auto rep = is_detectable(c, PauliOperator::single(4, l, q));
            CHECK(rep.detectable);
            CHECK(rep.mode == DetectMode::annihilated);
        }
    auto gauge = is_detectable(c, parse_pauli("X1 X2", 4));
    CHECK_FALSE(gauge.detectable);
    CHECK(gauge.mode == DetectMode::gauge_only);
    auto logical = is_detectable(c, parse_pauli("X1 X3", 4));
    CHECK_FALSE(logical.detectable);
    CHECK(logical.mode == DetectMode::logical_action);
    auto stab = is_detectable(c, parse_pauli("XXXX"));
    CHECK_FALSE(stab.detectable);
    CHECK(stab.mode == DetectMode::gauge_only);
}

TEST_CASE("detectability on the eight-qubit code: all weight-1 and weight-2 non-gauge") {
    SubsystemCode c = builtin_832();
    for (int q = 1; q <= 8; ++q)
        for (char l : {'X', 'Y', 'Z'})
            CHECK(is_detectable(c, PauliOperator::single(8, l, q)).detectable);
}

TEST_CASE("logical encoding of Pauli terms") {
    SubsystemCode c = builtin_832();
    PauliOperator x23 = parse_pauli("X2 X3", 3);
    PauliOperator canon = encode_pauli(x23, c);
    CHECK(canon.x_mask == parse_pauli("X1 X2 X3 X4 X5 X8", 8).x_mask);
    PauliOperator minw = encode_pauli(x23, c, RepresentativePolicy::min_weight);
    CHECK(minw == parse_pauli("X6 X7", 8));

    // chain: neighbouring ZZ terms land on single physical edges
    for (int N = 3; N <= 5; ++N) {
        SubsystemCode ch = builtin_chain(N);
        int n = ch.num_physical;
        for (int i = 1; i < N; ++i) {
            PauliOperator zz(N, 0,
                             (uint64_t{1} << (i - 1)) | (uint64_t{1} << i), 0);
            PauliOperator enc = encode_pauli(zz, ch);
            CHECK(enc == multiply(PauliOperator::single(n, 'Z', 2 * i + 1),
                                  PauliOperator::single(n, 'Z', 2 * i + 2)));
        }
        for (int i = 1; i <= N; ++i) {
            PauliOperator x(N, uint64_t{1} << (i - 1), 0, 0);
            CHECK(encode_pauli(x, ch) ==
                  multiply(PauliOperator::single(n, 'X', 2 * i),
                           PauliOperator::single(n, 'X', 2 * i + 1)));
        }
    }
}

TEST_CASE("encoded Hamiltonian keeps coefficients and schedule groups") {
    Hamiltonian h(3);
    h.add(0.7, parse_pauli("X1", 3), "one_minus_s");
    h.add(-1.3, parse_pauli("Z1 Z2", 3), "s");
    Hamiltonian enc = encode_hamiltonian(h, builtin_832(), RepresentativePolicy::min_weight);
    REQUIRE(enc.terms.size() == 2);
    CHECK(enc.num_qubits == 8);
    CHECK(enc.terms[0].coeff == 0.7);
    CHECK(enc.terms[0].group == "one_minus_s");
    CHECK(enc.terms[1].coeff == -1.3);
    CHECK(enc.terms[1].group == "s");
    for (const auto& t : enc.terms)
        for (const auto& st : builtin_832().stabilizer_gens)
            CHECK(commutes(t.pauli, st));
}

TEST_CASE("encoding basis: destabilizer symplectic relations") {
    for (const SubsystemCode& c : {builtin_412(), builtin_832(), builtin_chain(4)}) {
        EncodingBasis eb = make_encoding_basis(c);
        REQUIRE(static_cast<int>(eb.destabilizers.size()) == c.s());
        int n = c.num_physical;
        for (int q = 1; q <= n; ++q)
            for (int p = 1; p <= n; ++p) {
                CHECK(commutes(eb.x_partner(q), eb.x_partner(p)));
                CHECK(commutes(eb.z_partner(q), eb.z_partner(p)));
                CHECK(commutes(eb.x_partner(q), eb.z_partner(p)) == (q != p));
            }
    }
}

TEST_CASE("dense encoding unitary conjugates slot Paulis to code operators") {
    SubsystemCode c = builtin_412();
    EncodingBasis eb = make_encoding_basis(c);
    MatrixXcd u = encoding_unitary(eb);
    int n = 4;
    const Eigen::Index dim = 16;
    CHECK(spectral_norm(u.adjoint() * u - MatrixXcd::Identity(dim, dim)) < 1e-12);
    for (int q = 1; q <= n; ++q) {
        MatrixXcd zs = to_dense(PauliOperator::single(n, 'Z', q));
        MatrixXcd xs = to_dense(PauliOperator::single(n, 'X', q));
        CHECK(spectral_norm(u * zs * u.adjoint() - to_dense(eb.z_partner(q))) < 1e-12);
        CHECK(spectral_norm(u * xs * u.adjoint() - to_dense(eb.x_partner(q))) < 1e-12);
    }
}

TEST_CASE("symbolic unencode matches dense conjugation") {
    std::mt19937_64 rng(20260826);
    for (const SubsystemCode& c : {builtin_412(), builtin_chain(2)}) {
        EncodingBasis eb = make_encoding_basis(c);
        MatrixXcd u = encoding_unitary(eb);
        int n = c.num_physical;
        uint64_t mask = (uint64_t{1} << n) - 1;
        for (int trial = 0; trial < 40; ++trial) {
            PauliOperator p(n, rng() & mask, rng() & mask, static_cast<int>(rng() % 4));
            SlotPauli sp = unencode_pauli(eb, p);
            MatrixXcd lhs = u.adjoint() * to_dense(p) * u;
            MatrixXcd rhs = sp.coeff * to_dense(sp.pauli);
            REQUIRE(spectral_norm(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("code JSON export carries the generator sets") {
    nlohmann::json j = code_to_json(builtin_412());
    CHECK(j["params"]["n"] == 4);
    CHECK(j["params"]["k"] == 1);
    CHECK(j["params"]["d"] == 2);
    CHECK(j["stabilizer_gens"].size() == 2);
    CHECK(j["gauge_gens"].size() == 4);
    CHECK(j["bare_logical_pairs"].size() == 1);
}
