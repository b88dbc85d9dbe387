#pragma once

// Subsystem stabilizer codes: Bravyi A-matrix construction, the paper's
// builtin examples, codespace projectors, detectability checks, and logical
// encoding of Hamiltonians.
//
// Symplectic packing: a Pauli mask pair on n qubits becomes the 2n-bit word
// x | (z << n); the symplectic inner product of u, v is the parity of
// popcount(x_u & z_v) + popcount(z_u & x_v).

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "subpen/f2.hpp"
#include "subpen/hamiltonian.hpp"
#include "subpen/linalg.hpp"
#include "subpen/pauli.hpp"

namespace subpen {

// --- symplectic helpers ------------------------------------------------------

inline uint64_t symplectic_vector(const PauliOperator& p) {
    if (p.num_qubits > 32)
        throw std::invalid_argument("symplectic_vector: needs num_qubits <= 32");
    return p.x_mask | (p.z_mask << p.num_qubits);
}

inline PauliOperator pauli_from_symplectic(int n, uint64_t sv, int phase = 0) {
    uint64_t mask = (uint64_t{1} << n) - 1;
    return PauliOperator(n, sv & mask, (sv >> n) & mask, phase);
}

// Word whose dot-parity with sv(q) equals the symplectic product with p.
inline uint64_t symplectic_dual(int n, uint64_t sv) {
    uint64_t mask = (uint64_t{1} << n) - 1;
    return ((sv & mask) << n) | ((sv >> n) & mask);
}

inline int symplectic_product(int n, uint64_t u, uint64_t v) {
    return std::popcount(u & symplectic_dual(n, v)) & 1;
}

// Incremental F2 row space keyed by leading bit.
struct XorBasis {
    std::array<uint64_t, 64> lead{};
    uint64_t reduce(uint64_t v) const {
        while (v) {
            int l = 63 - std::countl_zero(v);
            if (!lead[l]) return v;
            v ^= lead[l];
        }
        return 0;
    }
    bool insert(uint64_t v) {
        v = reduce(v);
        if (!v) return false;
        lead[63 - std::countl_zero(v)] = v;
        return true;
    }
    bool contains(uint64_t v) const { return reduce(v) == 0; }
};

struct SymplecticGS {
    std::vector<std::pair<uint64_t, uint64_t>> pairs;  // hyperbolic (anticommuting) pairs
    std::vector<uint64_t> radical;                     // independent, commutes with everything here
};

// Symplectic Gram-Schmidt over F2. Reduces the span of `vectors` to
// hyperbolic pairs plus a radical basis. Deterministic: candidates are
// processed in the given order, partners chosen as the first anticommuting
// candidate.
inline SymplecticGS symplectic_gram_schmidt(int n, std::vector<uint64_t> vectors) {
    SymplecticGS out;
    std::vector<uint64_t> work;
    XorBasis seen;
    for (uint64_t v : vectors)
        if (seen.insert(v)) work.push_back(v);

    while (!work.empty()) {
        uint64_t a = work.front();
        work.erase(work.begin());
        auto it = std::find_if(work.begin(), work.end(),
                               [&](uint64_t w) { return symplectic_product(n, a, w) == 1; });
        if (it == work.end()) {
            out.radical.push_back(a);
            continue;
        }
        uint64_t b = *it;
        work.erase(it);
        for (uint64_t& w : work) {
            if (symplectic_product(n, w, b)) w ^= a;
            if (symplectic_product(n, w, a)) w ^= b;
        }
        out.pairs.emplace_back(a, b);
    }
    // Radical entries were only cleaned against pairs; reduce to a basis.
    std::vector<uint64_t> rad;
    XorBasis red;
    for (uint64_t v : out.radical)
        if (red.insert(v)) rad.push_back(v);
    out.radical = rad;
    return out;
}

// --- the code type -----------------------------------------------------------

struct CodeParams {
    int n = 0, k = 0, d = 0;
    bool operator==(const CodeParams&) const = default;
};

struct SubsystemCode {
    int num_physical = 0;
    std::vector<PauliOperator> stabilizer_gens;
    std::vector<PauliOperator> gauge_gens;  // generating set used for penalties (may be overcomplete)
    std::vector<std::pair<PauliOperator, PauliOperator>> bare_logical_pairs;  // (X-bar, Z-bar)
    std::vector<std::pair<PauliOperator, PauliOperator>> gauge_pairs;         // (X', Z')
    CodeParams params;
    std::map<int, std::pair<int, int>> geometry;  // qubit (1-indexed) -> (row, col), 1-indexed

    int s() const { return static_cast<int>(stabilizer_gens.size()); }
    int r() const { return static_cast<int>(gauge_pairs.size()); }
    int k() const { return static_cast<int>(bare_logical_pairs.size()); }
};

namespace detail {

inline std::vector<uint64_t> gauge_span_vectors(const SubsystemCode& code) {
    std::vector<uint64_t> v;
    for (const auto& g : code.gauge_gens) v.push_back(symplectic_vector(g));
    for (const auto& g : code.stabilizer_gens) v.push_back(symplectic_vector(g));
    return v;
}

}  // namespace detail

// --- construction from an A-matrix -------------------------------------------

// Bravyi's construction: one qubit per nonzero entry of `a` (numbered
// row-major), XX gauge generators between consecutive qubits in a row, ZZ
// between consecutive qubits in a column. The stabilizer group is the center
// of the gauge group; bare logicals span the symplectic complement of the
// gauge span modulo the stabilizer.
inline SubsystemCode code_from_a_matrix(const BinaryMatrix& a) {
    if (a.weight() == 0) throw std::invalid_argument("code_from_a_matrix: all-zero matrix");
    SubsystemCode code;
    int n = a.weight();
    if (n > 32) throw std::invalid_argument("code_from_a_matrix: too many qubits");
    code.num_physical = n;

    // qubit numbering: row-major over nonzero entries
    std::map<std::pair<int, int>, int> index;  // (row, col) -> qubit
    int q = 0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            if (a.get(r, c)) {
                ++q;
                index[{r, c}] = q;
                code.geometry[q] = {r + 1, c + 1};
            }

    auto two_body = [&](char letter, int qa, int qb) {
        PauliOperator p = multiply(PauliOperator::single(n, letter, qa),
                                   PauliOperator::single(n, letter, qb));
        return p;
    };
    for (int r = 0; r < a.rows(); ++r) {
        int prev = 0;
        for (int c = 0; c < a.cols(); ++c)
            if (a.get(r, c)) {
                int cur = index[{r, c}];
                if (prev) code.gauge_gens.push_back(two_body('X', prev, cur));
                prev = cur;
            }
    }
    for (int c = 0; c < a.cols(); ++c) {
        int prev = 0;
        for (int r = 0; r < a.rows(); ++r)
            if (a.get(r, c)) {
                int cur = index[{r, c}];
                if (prev) code.gauge_gens.push_back(two_body('Z', prev, cur));
                prev = cur;
            }
    }

    // gauge pairs + center via symplectic Gram-Schmidt on the gauge span
    std::vector<uint64_t> gv;
    for (const auto& g : code.gauge_gens) gv.push_back(symplectic_vector(g));
    SymplecticGS gs = symplectic_gram_schmidt(n, gv);
    for (uint64_t svc : gs.radical)
        code.stabilizer_gens.push_back(pauli_from_symplectic(n, svc));
    for (auto [xa, za] : gs.pairs)
        code.gauge_pairs.emplace_back(pauli_from_symplectic(n, xa), pauli_from_symplectic(n, za));

    // bare logicals: symplectic complement of the gauge span, modulo stabilizer
    BinaryMatrix constraints(0, 2 * n);
    for (const auto& g : code.gauge_gens)
        constraints.append_row(symplectic_dual(n, symplectic_vector(g)));
    std::vector<uint64_t> comp = f2_kernel_basis(constraints);  // dim s + 2k
    // drop the stabilizer part: keep vectors independent modulo the S span
    XorBasis red;
    for (const auto& st : code.stabilizer_gens)
        red.insert(symplectic_vector(st));
    std::vector<uint64_t> logical_candidates;
    std::sort(comp.begin(), comp.end());  // deterministic tie-breaking
    for (uint64_t v : comp)
        if (red.insert(v)) logical_candidates.push_back(v);
    SymplecticGS lgs = symplectic_gram_schmidt(n, logical_candidates);
    if (!lgs.radical.empty())
        throw std::runtime_error("code_from_a_matrix: logical pairing failed");
    for (auto [xa, za] : lgs.pairs)
        code.bare_logical_pairs.emplace_back(pauli_from_symplectic(n, xa), pauli_from_symplectic(n, za));

    int k = static_cast<int>(code.bare_logical_pairs.size());
    if (k != f2_rank(a))
        throw std::runtime_error("code_from_a_matrix: k disagrees with rank(A)");
    int d = std::min(min_nonzero_weight_rowspace(a), min_nonzero_weight_rowspace(a.transposed()));
    code.params = {n, k, d};
    return code;
}

// --- the paper's builtin codes ------------------------------------------------

inline SubsystemCode builtin_412() {
    SubsystemCode c;
    c.num_physical = 4;
    c.stabilizer_gens = {parse_pauli("XXXX"), parse_pauli("ZZZZ")};
    // g1..g4 ordering as in the appendix analysis
    c.gauge_gens = {parse_pauli("X3 X4", 4), parse_pauli("Z2 Z4", 4),
                    parse_pauli("X1 X2", 4), parse_pauli("Z1 Z3", 4)};
    c.gauge_pairs = {{parse_pauli("X1 X2", 4), parse_pauli("Z1 Z3", 4)}};
    c.bare_logical_pairs = {{parse_pauli("X1 X3", 4), parse_pauli("Z1 Z2", 4)}};
    c.params = {4, 1, 2};
    c.geometry = {{1, {1, 1}}, {2, {1, 2}}, {3, {2, 1}}, {4, {2, 2}}};
    return c;
}

inline SubsystemCode builtin_832() {
    SubsystemCode c;
    c.num_physical = 8;
    c.stabilizer_gens = {parse_pauli("XXXXXXXX"), parse_pauli("ZZZZZZZZ")};
    c.gauge_gens = {parse_pauli("X1 X2", 8), parse_pauli("X3 X4", 8),
                    parse_pauli("X5 X6", 8), parse_pauli("X7 X8", 8),
                    parse_pauli("Z2 Z3", 8), parse_pauli("Z4 Z5", 8),
                    parse_pauli("Z6 Z7", 8), parse_pauli("Z8 Z1", 8)};
    c.bare_logical_pairs = {
        {parse_pauli("X1 X8", 8), parse_pauli("Z1 Z2", 8)},
        {parse_pauli("X1 X2 X3 X8", 8), parse_pauli("Z3 Z4 Z5 Z6", 8)},
        {parse_pauli("X4 X5", 8), parse_pauli("Z5 Z6", 8)}};
    // canonical gauge pairs recovered from the generator span
    std::vector<uint64_t> gv;
    for (const auto& g : c.gauge_gens) gv.push_back(symplectic_vector(g));
    SymplecticGS gs = symplectic_gram_schmidt(8, gv);
    for (auto [xa, za] : gs.pairs)
        c.gauge_pairs.emplace_back(pauli_from_symplectic(8, xa), pauli_from_symplectic(8, za));
    c.params = {8, 3, 2};
    // chain-ordered labels: qubit 2i-1 = (i,i), qubit 2i = (i,i+1); row 4 wraps
    for (int i = 1; i <= 4; ++i) {
        c.geometry[2 * i - 1] = {i, i};
        c.geometry[2 * i] = {i, i == 4 ? 1 : i + 1};
    }
    return c;
}

// [[2N+2, N, 2]] protected-chain code, with the paper's chain-ordered qubit
// labels: qubit 2i-1 = (i,i), qubit 2i = (i,i+1), wrapping in row a = N+1.
inline SubsystemCode builtin_chain(int N) {
    if (N < 2) throw std::invalid_argument("builtin_chain: need N >= 2");
    int a = N + 1;
    int n = 2 * a;
    if (n > 32) throw std::invalid_argument("builtin_chain: N too large");
    SubsystemCode c;
    c.num_physical = n;
    uint64_t all = (uint64_t{1} << n) - 1;
    c.stabilizer_gens = {PauliOperator(n, all, 0), PauliOperator(n, 0, all)};
    auto two = [&](char letter, int qa, int qb) {
        return multiply(PauliOperator::single(n, letter, qa), PauliOperator::single(n, letter, qb));
    };
    for (int i = 1; i <= a; ++i) c.gauge_gens.push_back(two('X', 2 * i - 1, 2 * i));
    for (int i = 1; i <= N; ++i) c.gauge_gens.push_back(two('Z', 2 * i, 2 * i + 1));
    c.gauge_gens.push_back(two('Z', 1, n));
    for (int i = 1; i <= N; ++i) {
        PauliOperator zbar = PauliOperator::identity(n);
        for (int j = 1; j <= i; ++j) zbar = multiply(zbar, two('Z', 2 * j - 1, 2 * j));
        c.bare_logical_pairs.emplace_back(two('X', 2 * i, 2 * i + 1), zbar);
    }
    std::vector<uint64_t> gv;
    for (const auto& g : c.gauge_gens) gv.push_back(symplectic_vector(g));
    SymplecticGS gs = symplectic_gram_schmidt(n, gv);
    for (auto [xa, za] : gs.pairs)
        c.gauge_pairs.emplace_back(pauli_from_symplectic(n, xa), pauli_from_symplectic(n, za));
    c.params = {n, N, 2};
    for (int i = 1; i <= a; ++i) {
        c.geometry[2 * i - 1] = {i, i};
        c.geometry[2 * i] = {i, i == a ? 1 : i + 1};
    }
    return c;
}

// --- dense codespace projector -------------------------------------------------

inline MatrixXcd codespace_projector(const SubsystemCode& code) {
    int n = code.num_physical;
    if (n > kDenseQubitLimit)
        throw std::invalid_argument("codespace_projector: dense limit exceeded");
    const Eigen::Index dim = Eigen::Index{1} << n;
    MatrixXcd p = MatrixXcd::Identity(dim, dim);
    for (const auto& st : code.stabilizer_gens)
        p = 0.5 * (p + to_dense(st) * p);
    return p;
}

// --- detectability -------------------------------------------------------------

enum class DetectMode { annihilated, gauge_only, logical_action };

struct DetectabilityReport {
    PauliOperator error;
    bool detectable = false;
    DetectMode mode = DetectMode::logical_action;
    double residual_norm = 0.0;
};

inline const char* to_string(DetectMode m) {
    switch (m) {
        case DetectMode::annihilated: return "annihilated";
        case DetectMode::gauge_only: return "gauge_only";
        default: return "logical_action";
    }
}

// For Pauli errors on a stabilizer subsystem code. Decides symplectically
// (anticommutes with a stabilizer <=> P_C E P_C = 0; mask in the gauge span
// <=> E acts as G_j x I_B), then backs the verdict with the dense residual
// when the register is small enough to realize densely.
inline DetectabilityReport is_detectable(const SubsystemCode& code, const PauliOperator& e,
                                         double tol = 1e-10) {
    if (e.num_qubits != code.num_physical)
        throw std::invalid_argument("is_detectable: qubit count mismatch");
    DetectabilityReport rep;
    rep.error = e;
    bool anti = false;
    for (const auto& st : code.stabilizer_gens)
        if (!commutes(st, e)) { anti = true; break; }
    // redundant dense verification of the symplectic verdict on small codes
    bool dense_ok = code.num_physical <= 8;
    if (anti) {
        rep.detectable = true;
        rep.mode = DetectMode::annihilated;
        if (dense_ok) {
            MatrixXcd pc = codespace_projector(code);
            rep.residual_norm = spectral_norm(pc * to_dense(e) * pc);
            if (rep.residual_norm > tol)
                throw std::runtime_error("is_detectable: symplectic and dense checks disagree");
        }
        return rep;
    }
    // commutes with all stabilizers: gauge element or logical action
    std::vector<uint64_t> span = detail::gauge_span_vectors(code);
    bool in_gauge = f2_in_span(span, 2 * code.num_physical, symplectic_vector(e));
    rep.detectable = false;
    rep.mode = in_gauge ? DetectMode::gauge_only : DetectMode::logical_action;
    if (dense_ok && in_gauge) {
        // trivial action on the information subsystem: P_C E P_C commutes
        // with every bare logical on the codespace
        MatrixXcd pc = codespace_projector(code);
        MatrixXcd m = pc * to_dense(e) * pc;
        double res = 0;
        for (const auto& [xb, zb] : code.bare_logical_pairs) {
            MatrixXcd lx = to_dense(xb), lz = to_dense(zb);
            res = std::max(res, spectral_norm(m * lx - lx * m));
            res = std::max(res, spectral_norm(m * lz - lz * m));
        }
        rep.residual_norm = res;
        if (res > tol)
            throw std::runtime_error("is_detectable: gauge element acts on the logical subsystem");
    }
    return rep;
}

// --- encoded Hamiltonians --------------------------------------------------------

enum class RepresentativePolicy { canonical, min_weight };

// Replaces each logical Pauli by a bare-logical representative. The logical
// operator on logical qubit j maps through (X-bar_j, Z-bar_j); Y maps to
// i X-bar Z-bar. min_weight additionally multiplies by the stabilizer span
// element minimizing the physical weight (exhaustive, s <= 10).
inline PauliOperator encode_pauli(const PauliOperator& logical, const SubsystemCode& code,
                                  RepresentativePolicy policy = RepresentativePolicy::canonical) {
    if (logical.num_qubits != code.k())
        throw std::invalid_argument("encode_pauli: operator must act on the k logical qubits");
    int n = code.num_physical;
    PauliOperator out = PauliOperator::identity(n);
    out.phase_exponent = logical.phase_exponent;
    for (int j = 1; j <= logical.num_qubits; ++j) {
        char letter = logical.letter(j);
        const auto& [xb, zb] = code.bare_logical_pairs[j - 1];
        switch (letter) {
            case 'X': out = multiply(out, xb); break;
            case 'Z': out = multiply(out, zb); break;
            case 'Y':
                out = multiply(out, xb);
                out = multiply(out, zb);
                out.phase_exponent = (out.phase_exponent + 1) % 4;
                break;
            default: break;
        }
    }
    if (policy == RepresentativePolicy::min_weight) {
        int s = code.s();
        if (s > 10) throw std::invalid_argument("encode_pauli: min_weight needs s <= 10");
        PauliOperator best = out;
        for (uint64_t bits = 1; bits < (uint64_t{1} << s); ++bits) {
            PauliOperator cand = out;
            for (int i = 0; i < s; ++i)
                if ((bits >> i) & 1u) cand = multiply(cand, code.stabilizer_gens[i]);
            if (weight(cand) < weight(best) ||
                (weight(cand) == weight(best) &&
                 symplectic_vector(cand) < symplectic_vector(best)))
                best = cand;
        }
        out = best;
    }
    return out;
}

inline Hamiltonian encode_hamiltonian(const Hamiltonian& h, const SubsystemCode& code,
                                      RepresentativePolicy policy = RepresentativePolicy::canonical) {
    Hamiltonian out(code.num_physical);
    for (const auto& t : h.terms) {
        PauliOperator enc = encode_pauli(t.pauli, code, policy);
        if (!enc.is_hermitian())
            throw std::runtime_error("encode_hamiltonian: unmappable term");
        out.add(t.coeff, enc, t.group);
    }
    return out;
}

// Gauge-sum penalty: +1 on every gauge group generator.
inline Hamiltonian gauge_sum_penalty(const SubsystemCode& code) {
    Hamiltonian h(code.num_physical);
    for (const auto& g : code.gauge_gens) h.add(1.0, g);
    return h;
}

// The protected-chain penalty, Appendix-F sign convention (overall minus).
inline Hamiltonian chain_penalty(int N) {
    int a = N + 1;
    int n = 2 * a;
    Hamiltonian h(n);
    auto two = [&](char letter, int qa, int qb) {
        return multiply(PauliOperator::single(n, letter, qa), PauliOperator::single(n, letter, qb));
    };
    for (int i = 1; i <= a; ++i) h.add(-1.0, two('X', 2 * i - 1, 2 * i));
    for (int i = 1; i <= N; ++i) h.add(-1.0, two('Z', 2 * i, 2 * i + 1));
    h.add(-1.0, two('Z', 1, n));
    return h;
}

// Encoded transverse-field Ising chain on the [[2N+2, N, 2]] code.
inline Hamiltonian chain_encoded_system(int N, const std::vector<double>& couplings = {}) {
    int n = 2 * (N + 1);
    Hamiltonian h(n);
    auto two = [&](char letter, int qa, int qb) {
        return multiply(PauliOperator::single(n, letter, qa), PauliOperator::single(n, letter, qb));
    };
    for (int i = 1; i <= N; ++i) h.add(1.0, two('X', 2 * i, 2 * i + 1), "one_minus_s");
    for (int i = 1; i <= N - 1; ++i) {
        double j = couplings.empty() ? 1.0 : couplings.at(i - 1);
        h.add(j, two('Z', 2 * i + 1, 2 * i + 2), "s");
    }
    return h;
}

// --- JSON export -----------------------------------------------------------------

inline nlohmann::json code_to_json(const SubsystemCode& code) {
    nlohmann::json j;
    j["params"] = {{"n", code.params.n}, {"k", code.params.k}, {"d", code.params.d}};
    auto plist = [](const std::vector<PauliOperator>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& p : v) a.push_back(to_sparse_string(p));
        return a;
    };
    j["stabilizer_gens"] = plist(code.stabilizer_gens);
    j["gauge_gens"] = plist(code.gauge_gens);
    nlohmann::json lp = nlohmann::json::array();
    for (const auto& [x, z] : code.bare_logical_pairs)
        lp.push_back({{"X", to_sparse_string(x)}, {"Z", to_sparse_string(z)}});
    j["bare_logical_pairs"] = lp;
    nlohmann::json gp = nlohmann::json::array();
    for (const auto& [x, z] : code.gauge_pairs)
        gp.push_back({{"X", to_sparse_string(x)}, {"Z", to_sparse_string(z)}});
    j["gauge_pairs"] = gp;
    if (!code.geometry.empty()) {
        nlohmann::json g;
        for (const auto& [q, rc] : code.geometry)
            g[std::to_string(q)] = {rc.first, rc.second};
        j["geometry"] = g;
    }
    return j;
}

}  // namespace subpen
