#pragma once

// Clifford encoding unitaries for subsystem codes, plus a symbolic
// "unencode" that rewrites a physical Pauli in the slot picture
// [ancilla s | gauge r | logical k] without touching dense matrices.
//
// The construction completes {S_i} with destabilizers {D_i} so that the
// 2n operators {S, D, X', Z', X-bar, Z-bar} form a full symplectic basis.
// U_enc maps slot Paulis to physical ones:
//   Z on ancilla slot i   -> S_i        X on ancilla slot i   -> D_i
//   Z on gauge slot j     -> Z'_j       X on gauge slot j     -> X'_j
//   Z on logical slot l   -> Z-bar_l    X on logical slot l   -> X-bar_l

#include <complex>
#include <stdexcept>
#include <vector>

#include "subpen/code.hpp"
#include "subpen/f2.hpp"
#include "subpen/linalg.hpp"
#include "subpen/pauli.hpp"

namespace subpen {

struct EncodingBasis {
    SubsystemCode code;
    std::vector<PauliOperator> destabilizers;  // D_i: anticommutes with S_i only

    int num_qubits() const { return code.num_physical; }

    // X-type / Z-type partner for slot q (1-indexed in [ancilla|gauge|logical])
    const PauliOperator& z_partner(int q) const {
        int s = code.s(), r = code.r();
        if (q <= s) return code.stabilizer_gens[q - 1];
        if (q <= s + r) return code.gauge_pairs[q - s - 1].second;
        return code.bare_logical_pairs[q - s - r - 1].second;
    }
    const PauliOperator& x_partner(int q) const {
        int s = code.s(), r = code.r();
        if (q <= s) return destabilizers[q - 1];
        if (q <= s + r) return code.gauge_pairs[q - s - 1].first;
        return code.bare_logical_pairs[q - s - r - 1].first;
    }
};

// Completes the code's symplectic basis with destabilizers, solving for each
// D_i over F2: anticommute with S_i, commute with every other basis operator
// and every previously chosen destabilizer. Deterministic (the F2 solver's
// free variables are set to zero).
inline EncodingBasis make_encoding_basis(const SubsystemCode& code) {
    EncodingBasis eb;
    eb.code = code;
    int n = code.num_physical;
    int s = code.s(), r = code.r(), k = code.k();
    if (s + r + k != n)
        throw std::invalid_argument("make_encoding_basis: s + r + k != n");
    std::vector<uint64_t> others;
    for (const auto& st : code.stabilizer_gens) others.push_back(symplectic_vector(st));
    for (const auto& [x, z] : code.gauge_pairs) {
        others.push_back(symplectic_vector(x));
        others.push_back(symplectic_vector(z));
    }
    for (const auto& [x, z] : code.bare_logical_pairs) {
        others.push_back(symplectic_vector(x));
        others.push_back(symplectic_vector(z));
    }
    for (int i = 0; i < s; ++i) {
        BinaryMatrix m(0, 2 * n);
        uint64_t b = 0;
        int row = 0;
        for (int j = 0; j < s; ++j) {
            m.append_row(symplectic_dual(n, others[j]));
            if (j == i) b |= uint64_t{1} << row;
            ++row;
        }
        for (size_t j = s; j < others.size(); ++j) {
            m.append_row(symplectic_dual(n, others[j]));
            ++row;
        }
        for (const auto& d : eb.destabilizers) {
            m.append_row(symplectic_dual(n, symplectic_vector(d)));
            ++row;
        }
        uint64_t x = 0;
        if (!f2_solve(m, b, x))
            throw std::runtime_error("make_encoding_basis: no destabilizer solution");
        eb.destabilizers.push_back(pauli_from_symplectic(n, x));
    }
    return eb;
}

// Dense U_enc. Column b is F_b |e0>, where |e0> is the joint +1 eigenstate of
// all Z-partners and F_b applies the X-partners on the set bits of b (slot 1
// is the leftmost / most significant bit, matching the Kronecker order).
inline MatrixXcd encoding_unitary(const EncodingBasis& eb) {
    int n = eb.num_qubits();
    if (n > kDenseQubitLimit)
        throw std::invalid_argument("encoding_unitary: dense limit exceeded");
    const Eigen::Index dim = Eigen::Index{1} << n;
    // project |00..0> onto the joint +1 eigenspace; fall back to other basis
    // vectors if the projection vanishes
    VectorXcd e0;
    for (Eigen::Index seed = 0; seed < dim; ++seed) {
        VectorXcd v = VectorXcd::Zero(dim);
        v[seed] = 1.0;
        VectorXcd tmp(dim);
        for (int q = 1; q <= n; ++q) {
            apply_pauli(eb.z_partner(q), v, tmp);
            v = 0.5 * (v + tmp);
        }
        double nrm = v.norm();
        if (nrm > 1e-9) {
            e0 = v / nrm;
            break;
        }
    }
    if (e0.size() == 0) throw std::runtime_error("encoding_unitary: empty joint eigenspace");
    MatrixXcd u(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        VectorXcd col = e0, tmp(dim);
        for (int q = n; q >= 1; --q)  // rightmost slot applied first
            if ((b >> (n - q)) & 1) {
                apply_pauli(eb.x_partner(q), col, tmp);
                col.swap(tmp);
            }
        u.col(b) = col;
    }
    return u;
}

// A Pauli written in the slot picture, with an exact scalar prefactor:
// result = coeff * (slot Pauli).
struct SlotPauli {
    PauliOperator pauli;  // on s + r + k slot qubits
    std::complex<double> coeff{1.0, 0.0};
};

// Rewrites a physical Pauli P as U_enc^dag P U_enc, symbolically. P must lie
// in the Pauli group (any physical Pauli does). Decomposes sv(P) over the
// symplectic basis and compares the ordered product of basis elements with P
// to fix the phase.
inline SlotPauli unencode_pauli(const EncodingBasis& eb, const PauliOperator& p) {
    int n = eb.num_qubits();
    if (p.num_qubits != n) throw std::invalid_argument("unencode_pauli: qubit count mismatch");
    // solve sv(P) = sum over chosen basis vectors
    BinaryMatrix m(0, 2 * n);
    std::vector<PauliOperator> basis;   // column order: Z_1..Z_n then X_1..X_n (slot index)
    for (int q = 1; q <= n; ++q) basis.push_back(eb.z_partner(q));
    for (int q = 1; q <= n; ++q) basis.push_back(eb.x_partner(q));
    for (const auto& bop : basis) m.append_row(symplectic_vector(bop));
    uint64_t sel = 0;
    if (!f2_solve(m.transposed(), symplectic_vector(p), sel))
        throw std::runtime_error("unencode_pauli: decomposition failed");

    // physical ordered product: all selected X-partners (ascending slot),
    // then all selected Z-partners (ascending slot); the slot-side image of
    // that order is X-mask then Z-mask with per-qubit XZ products
    PauliOperator phys = PauliOperator::identity(n);
    for (int q = 1; q <= n; ++q)
        if ((sel >> (n + q - 1)) & 1) phys = multiply(phys, eb.x_partner(q));
    for (int q = 1; q <= n; ++q)
        if ((sel >> (q - 1)) & 1) phys = multiply(phys, eb.z_partner(q));
    if (phys.x_mask != p.x_mask || phys.z_mask != p.z_mask)
        throw std::runtime_error("unencode_pauli: mask reconstruction failed");

    // slot image of the same ordered product, built with the same multiply
    PauliOperator slot = PauliOperator::identity(n);
    for (int q = 1; q <= n; ++q)
        if ((sel >> (n + q - 1)) & 1) slot = multiply(slot, PauliOperator::single(n, 'X', q));
    for (int q = 1; q <= n; ++q)
        if ((sel >> (q - 1)) & 1) slot = multiply(slot, PauliOperator::single(n, 'Z', q));
    slot.phase_exponent =
        ((slot.phase_exponent + p.phase_exponent - phys.phase_exponent) % 4 + 4) % 4;
    SlotPauli out;
    out.pauli = slot;
    out.coeff = 1.0;
    return out;
}

}  // namespace subpen
