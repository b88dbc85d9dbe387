#pragma once

// Dense Hermitian linear algebra on Eigen matrices, backed by LAPACKE.
// Real-symmetric inputs are routed to the real solver, which matters for the
// larger spin-chain spectra.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "subpen/pauli.hpp"

namespace subpen {

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

inline bool is_numerically_real(const MatrixXcd& m, double tol = 0.0) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j).imag()) > tol) return false;
    return true;
}

inline double hermiticity_defect(const MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

struct EighResult {
    VectorXd eigenvalues;   // ascending
    MatrixXcd eigenvectors; // columns
};

inline EighResult eigh(const MatrixXcd& m) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    if (m.cols() != m.rows()) throw std::invalid_argument("eigh: not square");
    EighResult r;
    r.eigenvalues.resize(n);
    if (is_numerically_real(m)) {
        MatrixXd a = m.real();
        lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, r.eigenvalues.data());
        if (info != 0) throw std::runtime_error("eigh: dsyevd failed");
        r.eigenvectors = a.cast<complexd>();
    } else {
        MatrixXcd a = m;
        lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                         r.eigenvalues.data());
        if (info != 0) throw std::runtime_error("eigh: zheevd failed");
        r.eigenvectors = a;
    }
    return r;
}

inline VectorXd eigvalsh(const MatrixXcd& m) {
    const lapack_int n = static_cast<lapack_int>(m.rows());
    if (m.cols() != m.rows()) throw std::invalid_argument("eigvalsh: not square");
    VectorXd w(n);
    if (is_numerically_real(m)) {
        MatrixXd a = m.real();
        lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
        if (info != 0) throw std::runtime_error("eigvalsh: dsyevd failed");
    } else {
        MatrixXcd a = m;
        lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                         w.data());
        if (info != 0) throw std::runtime_error("eigvalsh: zheevd failed");
    }
    return w;
}

inline VectorXd singular_values(const MatrixXcd& m) {
    MatrixXcd a = m;
    const lapack_int rows = static_cast<lapack_int>(a.rows());
    const lapack_int cols = static_cast<lapack_int>(a.cols());
    VectorXd s(std::min(rows, cols));
    lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols,
                                     reinterpret_cast<lapack_complex_double*>(a.data()), rows,
                                     s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("singular_values: zgesdd failed");
    return s;
}

// Spectral norm = largest singular value.
inline double spectral_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m)[0];
}

// Trace norm = sum of singular values.
inline double trace_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m).sum();
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// exp(-i t H) for Hermitian H.
inline MatrixXcd hermitian_propagator(const MatrixXcd& h, double t) {
    EighResult d = eigh(h);
    const Eigen::Index n = h.rows();
    VectorXcd ph(n);
    for (Eigen::Index i = 0; i < n; ++i)
        ph[i] = std::exp(complexd(0, -t * d.eigenvalues[i]));
    return d.eigenvectors * ph.asDiagonal() * d.eigenvectors.adjoint();
}

// Partial trace over a subset of qubits. dims: total n qubits, basis index
// has qubit 1 most significant. traced: 1-indexed qubit numbers to remove.
inline MatrixXcd partial_trace(const MatrixXcd& rho, int num_qubits, const std::vector<int>& traced) {
    const Eigen::Index dim = Eigen::Index{1} << num_qubits;
    if (rho.rows() != dim || rho.cols() != dim)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    std::vector<bool> is_traced(num_qubits + 1, false);
    for (int q : traced) {
        if (q < 1 || q > num_qubits) throw std::invalid_argument("partial_trace: bad qubit index");
        is_traced[q] = true;
    }
    int nt = static_cast<int>(traced.size());
    int nk = num_qubits - nt;
    // Bit-position lists in basis-index space (bit num_qubits - q for qubit q).
    std::vector<int> keep_bits, trace_bits;
    for (int q = 1; q <= num_qubits; ++q)
        (is_traced[q] ? trace_bits : keep_bits).push_back(num_qubits - q);
    auto expand = [](const std::vector<int>& bits, uint64_t compact) {
        uint64_t full = 0;
        for (size_t i = 0; i < bits.size(); ++i)
            if ((compact >> (bits.size() - 1 - i)) & 1u) full |= uint64_t{1} << bits[i];
        return full;
    };
    const Eigen::Index dk = Eigen::Index{1} << nk;
    const Eigen::Index dt = Eigen::Index{1} << nt;
    MatrixXcd out = MatrixXcd::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i) {
        uint64_t fi = expand(keep_bits, static_cast<uint64_t>(i));
        for (Eigen::Index j = 0; j < dk; ++j) {
            uint64_t fj = expand(keep_bits, static_cast<uint64_t>(j));
            complexd sum = 0;
            for (Eigen::Index t = 0; t < dt; ++t) {
                uint64_t ft = expand(trace_bits, static_cast<uint64_t>(t));
                sum += rho(static_cast<Eigen::Index>(fi | ft), static_cast<Eigen::Index>(fj | ft));
            }
            out(i, j) = sum;
        }
    }
    return out;
}

}  // namespace subpen
