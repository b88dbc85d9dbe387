#pragma once

// n-qubit Pauli operators in symplectic (x|z) representation.
//
// An operator is i^k * (sigma_1 x sigma_2 x ... x sigma_n) where sigma_j is
// the Pauli matrix selected by the bit pair (x_j, z_j): (0,0)=I, (1,0)=X,
// (1,1)=Y, (0,1)=Z, and k is phase_exponent mod 4. Qubit 1 is leftmost in
// Kronecker order (most significant index bit). Hermitian iff k is even.

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace subpen {

using complexd = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

inline constexpr int kDenseQubitLimit = 14;

struct PauliOperator {
    int num_qubits = 0;
    uint64_t x_mask = 0;
    uint64_t z_mask = 0;
    int phase_exponent = 0;  // mod 4

    PauliOperator() = default;
    PauliOperator(int n, uint64_t x, uint64_t z, int k = 0)
        : num_qubits(n), x_mask(x), z_mask(z), phase_exponent(((k % 4) + 4) % 4) {
        if (n < 1 || n > 64) throw std::invalid_argument("PauliOperator: need 1 <= num_qubits <= 64");
        uint64_t m = mask();
        if ((x & ~m) || (z & ~m)) throw std::invalid_argument("PauliOperator: mask bits outside num_qubits");
    }

    static PauliOperator identity(int n) { return PauliOperator(n, 0, 0, 0); }

    // Single-qubit Pauli embedded on qubit q (1-indexed), letter in {X,Y,Z}.
    static PauliOperator single(int n, char letter, int q) {
        if (q < 1 || q > n) throw std::invalid_argument("PauliOperator::single: qubit index out of range");
        uint64_t bit = uint64_t{1} << (q - 1);
        switch (letter) {
            case 'X': return PauliOperator(n, bit, 0);
            case 'Y': return PauliOperator(n, bit, bit);
            case 'Z': return PauliOperator(n, 0, bit);
            default: throw std::invalid_argument("PauliOperator::single: letter must be X, Y, or Z");
        }
    }

    uint64_t mask() const { return num_qubits == 64 ? ~uint64_t{0} : (uint64_t{1} << num_qubits) - 1; }

    bool is_identity_mask() const { return x_mask == 0 && z_mask == 0; }
    bool is_hermitian() const { return phase_exponent % 2 == 0; }
    double sign() const { return phase_exponent == 0 ? 1.0 : (phase_exponent == 2 ? -1.0 : 0.0); }

    char letter(int q) const {  // 1-indexed
        uint64_t bit = uint64_t{1} << (q - 1);
        bool x = x_mask & bit, z = z_mask & bit;
        return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }

    complexd phase() const {
        static const complexd tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return tab[phase_exponent];
    }

    bool operator==(const PauliOperator&) const = default;
};

namespace detail {
// Phase exponent g in sigma_a * sigma_b = i^g sigma_{a^b}, with letters
// encoded as (x + 2z).
inline constexpr int kPauliPhaseTab[4][4] = {
    // b:  I  X  Z  Y          a:
    {0, 0, 0, 0},           // I
    {0, 0, 3, 1},           // X
    {0, 1, 0, 3},           // Z
    {0, 3, 1, 0},           // Y
};
}  // namespace detail

inline PauliOperator multiply(const PauliOperator& p, const PauliOperator& q) {
    if (p.num_qubits != q.num_qubits)
        throw std::invalid_argument("pauli multiply: operand size mismatch");
    int k = p.phase_exponent + q.phase_exponent;
    uint64_t support = (p.x_mask | p.z_mask) & (q.x_mask | q.z_mask);
    while (support) {
        int j = std::countr_zero(support);
        support &= support - 1;
        int a = static_cast<int>((p.x_mask >> j) & 1) + 2 * static_cast<int>((p.z_mask >> j) & 1);
        int b = static_cast<int>((q.x_mask >> j) & 1) + 2 * static_cast<int>((q.z_mask >> j) & 1);
        k += detail::kPauliPhaseTab[a][b];
    }
    return PauliOperator(p.num_qubits, p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask, k);
}

inline bool commutes(const PauliOperator& p, const PauliOperator& q) {
    if (p.num_qubits != q.num_qubits)
        throw std::invalid_argument("pauli commutes: operand size mismatch");
    int parity = std::popcount(p.x_mask & q.z_mask) + std::popcount(p.z_mask & q.x_mask);
    return parity % 2 == 0;
}

inline int weight(const PauliOperator& p) { return std::popcount(p.x_mask | p.z_mask); }

// --- text forms -------------------------------------------------------------
// Dense: "+XIZY" (optional sign/phase prefix +, -, +i, -i).
// Sparse: "X1 Z3 Y4" (1-indexed); identity is "I".

inline std::string to_dense_string(const PauliOperator& p) {
    static const char* prefix[4] = {"+", "+i", "-", "-i"};
    std::string s = prefix[p.phase_exponent];
    for (int q = 1; q <= p.num_qubits; ++q) s += p.letter(q);
    return s;
}

inline std::string to_sparse_string(const PauliOperator& p) {
    static const char* prefix[4] = {"", "+i ", "- ", "-i "};
    std::string s = prefix[p.phase_exponent];
    bool any = false;
    for (int q = 1; q <= p.num_qubits; ++q) {
        char c = p.letter(q);
        if (c == 'I') continue;
        if (any) s += ' ';
        s += c;
        s += std::to_string(q);
        any = true;
    }
    if (!any) s += 'I';
    return s;
}

// Parses either text form. Dense form fixes num_qubits from the string;
// sparse form requires the caller's num_qubits (n), which must also be
// consistent when given alongside a dense string.
inline PauliOperator parse_pauli(const std::string& text, int n = 0) {
    size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip_ws();
    int k = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        bool neg = text[i] == '-';
        ++i;
        bool imag = i < text.size() && text[i] == 'i';
        if (imag) ++i;
        k = (neg ? 2 : 0) + (imag ? 1 : 0);
    }
    skip_ws();
    std::string body = text.substr(i);
    {
        std::string stripped;
        for (char c : body)
            if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
        if (stripped == "I" && n > 0) return PauliOperator(n, 0, 0, k);
    }
    bool sparse = body.find_first_of("0123456789") != std::string::npos;
    if (!sparse) {
        // dense: a run of letters
        uint64_t x = 0, z = 0;
        int q = 0;
        for (char c : body) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            uint64_t bit = uint64_t{1} << q;
            switch (c) {
                case 'I': break;
                case 'X': x |= bit; break;
                case 'Y': x |= bit; z |= bit; break;
                case 'Z': z |= bit; break;
                default: throw std::invalid_argument("parse_pauli: bad letter in dense form");
            }
            ++q;
        }
        if (q == 0) throw std::invalid_argument("parse_pauli: empty operator");
        if (n != 0 && n != q) throw std::invalid_argument("parse_pauli: dense length disagrees with num_qubits");
        return PauliOperator(q, x, z, k);
    }
    if (n <= 0) throw std::invalid_argument("parse_pauli: sparse form needs num_qubits");
    uint64_t x = 0, z = 0;
    while (i < text.size()) {
        skip_ws();
        if (i >= text.size()) break;
        char c = text[i++];
        if (c == 'I') continue;  // bare identity marker
        if (c != 'X' && c != 'Y' && c != 'Z')
            throw std::invalid_argument("parse_pauli: bad letter in sparse form");
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) throw std::invalid_argument("parse_pauli: sparse letter without index");
        int q = std::stoi(text.substr(start, i - start));
        if (q < 1 || q > n) throw std::invalid_argument("parse_pauli: qubit index out of range");
        uint64_t bit = uint64_t{1} << (q - 1);
        if ((x | z) & bit) throw std::invalid_argument("parse_pauli: repeated qubit index");
        if (c == 'X' || c == 'Y') x |= bit;
        if (c == 'Z' || c == 'Y') z |= bit;
    }
    return PauliOperator(n, x, z, k);
}

// --- dense realization -------------------------------------------------------
// Index bit convention: basis index b has qubit 1 in its most significant bit,
// so |b> = |b_1 b_2 ... b_n> with b = sum_j b_j 2^(n-j).

// In-place action on a state vector; cost O(terms * 2^n), no dense matrix.
inline void apply_pauli(const PauliOperator& p, const VectorXcd& in, VectorXcd& out) {
    int n = p.num_qubits;
    if (n > 30) throw std::invalid_argument("apply_pauli: dimension too large");
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (in.size() != dim) throw std::invalid_argument("apply_pauli: state dimension mismatch");
    out.resize(dim);
    // Map qubit-indexed masks (bit j-1 = qubit j) to basis-index masks
    // (bit n-j = qubit j).
    uint64_t xm = 0, zm = 0;
    for (int j = 1; j <= n; ++j) {
        uint64_t src = uint64_t{1} << (j - 1);
        uint64_t dst = uint64_t{1} << (n - j);
        if (p.x_mask & src) xm |= dst;
        if (p.z_mask & src) zm |= dst;
    }
    int y_count = std::popcount(p.x_mask & p.z_mask);
    static const complexd itab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    complexd base = itab[(p.phase_exponent + y_count) % 4];
    uint64_t yz = zm;
    for (Eigen::Index b = 0; b < dim; ++b) {
        // <b ^ xm| P |b> = base * (-1)^{popcount(b & zm)} up to the Y bookkeeping:
        // each Y contributes i * (-1)^{b_j}; folded into base via y_count and zm.
        int par = std::popcount(static_cast<uint64_t>(b) & yz);
        complexd coeff = (par & 1) ? -base : base;
        out[static_cast<Eigen::Index>(b ^ xm)] = coeff * in[b];
    }
}

inline MatrixXcd to_dense(const PauliOperator& p) {
    if (p.num_qubits > kDenseQubitLimit)
        throw std::invalid_argument("to_dense: num_qubits exceeds dense limit");
    const Eigen::Index dim = Eigen::Index{1} << p.num_qubits;
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    VectorXcd e = VectorXcd::Zero(dim), col(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        e.setZero();
        e[b] = 1.0;
        apply_pauli(p, e, col);
        m.col(b) = col;
    }
    return m;
}

}  // namespace subpen
