#pragma once

// Spectral decompositions of Hermitian operators and the suppression-
// condition checks: commutation of the encoded system term with the penalty,
// the diagonal-block condition Sum_a Pi_a V Pi_a P = c P, eigenvalue
// disjointness under conjugated penalties, the per-block variant, the
// stabilizer sign condition, and the sector-reduced spectrum of the
// protected-chain penalty.

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subpen/code.hpp"
#include "subpen/encoding.hpp"
#include "subpen/hamiltonian.hpp"
#include "subpen/linalg.hpp"

namespace subpen {

// --- spectral decomposition ---------------------------------------------------

struct SpectralDecomposition {
    std::vector<double> eigenvalues;    // distinct, ascending
    std::vector<MatrixXcd> projectors;  // orthogonal Hermitian idempotents, same order
    double degeneracy_tol = 0.0;

    Eigen::Index dim() const { return projectors.empty() ? 0 : projectors.front().rows(); }
};

// Groups eigenvalues within degeneracy_tol into shared projectors. A negative
// tol means 1e-8 relative to the spectral range (floored at 1e-12 absolute).
inline SpectralDecomposition eigendecompose(const MatrixXcd& h, double degeneracy_tol = -1.0) {
    if (hermiticity_defect(h) > 1e-10)
        throw std::invalid_argument("eigendecompose: operator is not Hermitian");
    EighResult e = eigh(h);
    const Eigen::Index dim = h.rows();
    double range = dim ? e.eigenvalues[dim - 1] - e.eigenvalues[0] : 0.0;
    if (degeneracy_tol < 0) degeneracy_tol = std::max(1e-8 * range, 1e-12);
    SpectralDecomposition d;
    d.degeneracy_tol = degeneracy_tol;
    Eigen::Index i = 0;
    while (i < dim) {
        Eigen::Index j = i;
        double sum = 0.0;
        while (j < dim && e.eigenvalues[j] - e.eigenvalues[i] <= degeneracy_tol) sum += e.eigenvalues[j++];
        auto block = e.eigenvectors.middleCols(i, j - i);
        d.eigenvalues.push_back(sum / static_cast<double>(j - i));
        d.projectors.push_back(block * block.adjoint());
        i = j;
    }
    return d;
}

// --- condition reports ----------------------------------------------------------

struct ConditionReport {
    std::string id;
    bool satisfied = false;
    double residual = 0.0;                // max residual behind the verdict
    std::optional<double> constant;       // the scalar c when one is extracted
    nlohmann::json details;               // witnesses, per-error spectra, per-block constants
};

inline nlohmann::json condition_report_to_json(const ConditionReport& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["satisfied"] = r.satisfied;
    j["residual"] = r.residual;
    if (r.constant) j["constant"] = *r.constant;
    if (!r.details.is_null()) j["details"] = r.details;
    return j;
}

// Max over sampled s of ||[Hbar_S(s), H_p]|| and ||[Hbar_S(s), P]||.
inline ConditionReport check_commutation(const Hamiltonian& hbar_s, const Hamiltonian& h_p,
                                         const MatrixXcd& p,
                                         const std::vector<double>& s_samples = {0.0, 0.5, 1.0},
                                         double tol = 1e-10) {
    ConditionReport rep;
    rep.id = "commutation";
    MatrixXcd hp = h_p.to_dense(0.0);
    double worst_hp = 0.0, worst_p = 0.0;
    for (double s : s_samples) {
        MatrixXcd hs = hbar_s.to_dense(s);
        worst_hp = std::max(worst_hp, spectral_norm(hs * hp - hp * hs));
        worst_p = std::max(worst_p, spectral_norm(hs * p - p * hs));
    }
    rep.residual = std::max(worst_hp, worst_p);
    rep.satisfied = rep.residual <= tol;
    rep.details = {{"max_commutator_with_penalty", worst_hp},
                   {"max_commutator_with_projector", worst_p},
                   {"s_samples", s_samples}};
    return rep;
}

// Diagonal-block condition: R = Sum_a Pi_a V Pi_a P must equal c P.
inline ConditionReport check_theorem1_condition(const MatrixXcd& v, const SpectralDecomposition& d,
                                                const MatrixXcd& p, double tol = 1e-9) {
    if (spectral_norm(p * p - p) > 1e-8)
        throw std::invalid_argument("check_theorem1_condition: p is not a projector");
    ConditionReport rep;
    rep.id = "diagonal_block";
    MatrixXcd r = MatrixXcd::Zero(p.rows(), p.cols());
    for (const auto& pi : d.projectors) r += pi * v * pi * p;
    double tp = p.trace().real();
    double c = tp > 0 ? (p * r).trace().real() / tp : 0.0;
    rep.constant = c;
    rep.residual = spectral_norm(r - c * p);
    rep.satisfied = rep.residual <= tol;
    return rep;
}

namespace detail {

// Orthonormal basis of range(p) for a projector p.
inline MatrixXcd range_basis(const MatrixXcd& p, double tol = 1e-8) {
    EighResult e = eigh(p);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        if (e.eigenvalues[i] > 0.5) ++rank;
    (void)tol;
    return e.eigenvectors.rightCols(rank);
}

inline std::vector<double> distinct_sorted(VectorXd vals, double tol) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals)
        if (out.empty() || v - out.back() > tol) out.push_back(v);
    return out;
}

}  // namespace detail

// Condition 1: for each error sigma, the spectrum of H_p on range(P) and the
// spectrum of sigma H_p sigma on range(P) must be disjoint.
inline ConditionReport check_condition1(const Hamiltonian& h_p, const MatrixXcd& p,
                                        const std::vector<PauliOperator>& errors,
                                        double degeneracy_tol = 1e-8) {
    MatrixXcd hp = h_p.to_dense(0.0);
    if (spectral_norm(hp * p - p * hp) > 1e-8)
        throw std::invalid_argument("check_condition1: penalty does not commute with p");
    ConditionReport rep;
    rep.id = "condition1";
    rep.satisfied = true;
    MatrixXcd b = detail::range_basis(p);
    std::vector<double> base =
        detail::distinct_sorted(eigvalsh(b.adjoint() * hp * b), degeneracy_tol);
    rep.details["penalty_spectrum_on_p"] = base;
    rep.details["errors"] = nlohmann::json::array();
    double min_sep = std::numeric_limits<double>::infinity();
    for (const auto& err : errors) {
        MatrixXcd sm = to_dense(err);
        std::vector<double> conj =
            detail::distinct_sorted(eigvalsh(b.adjoint() * sm * hp * sm * b), degeneracy_tol);
        double sep = std::numeric_limits<double>::infinity();
        for (double a : base)
            for (double c : conj) sep = std::min(sep, std::abs(a - c));
        bool ok = sep > degeneracy_tol;
        min_sep = std::min(min_sep, sep);
        rep.details["errors"].push_back({{"pauli", to_sparse_string(err)},
                                         {"conjugated_spectrum", conj},
                                         {"min_separation", sep},
                                         {"disjoint", ok}});
        if (!ok) rep.satisfied = false;
    }
    rep.residual = errors.empty() || !std::isfinite(min_sep) ? 0.0 : min_sep;
    rep.details["min_separation"] = rep.residual;
    return rep;
}

// Per-block diagonal condition (the replacement rule for block-local noise):
// pi_a v pi_a p = c p within every block, blocks on disjoint supports.
struct NoiseBlock {
    MatrixXcd v;        // block-local noise operator
    MatrixXcd penalty;  // block-local penalty
    MatrixXcd p;        // block-local code projector
    uint64_t support = 0;  // physical-qubit mask, used only for disjointness
};

inline ConditionReport check_block_condition(const std::vector<NoiseBlock>& blocks,
                                             double tol = 1e-9) {
    uint64_t seen = 0;
    for (const auto& blk : blocks) {
        if (blk.support & seen)
            throw std::invalid_argument("check_block_condition: overlapping block supports");
        seen |= blk.support;
    }
    ConditionReport rep;
    rep.id = "block_diagonal";
    rep.satisfied = true;
    rep.details["blocks"] = nlohmann::json::array();
    for (const auto& blk : blocks) {
        SpectralDecomposition d = eigendecompose(blk.penalty);
        ConditionReport inner = check_theorem1_condition(blk.v, d, blk.p, tol);
        rep.residual = std::max(rep.residual, inner.residual);
        rep.details["blocks"].push_back(
            {{"constant", *inner.constant}, {"residual", inner.residual}});
        if (!inner.satisfied) rep.satisfied = false;
    }
    return rep;
}

// Stabilizer penalty sign condition: for each error column j,
// Sum_i alpha_i != Sum_i alpha_i (-1)^(a_ij).
inline ConditionReport stabilizer_sign_condition(const std::vector<double>& alphas,
                                                 const BinaryMatrix& anticomm,
                                                 double tol = 1e-12) {
    if (static_cast<int>(alphas.size()) != anticomm.rows())
        throw std::invalid_argument("stabilizer_sign_condition: alpha count != rows");
    ConditionReport rep;
    rep.id = "stabilizer_sign";
    rep.satisfied = true;
    double total = 0.0;
    for (double a : alphas) total += a;
    rep.details["violating_errors"] = nlohmann::json::array();
    double min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < anticomm.cols(); ++j) {
        double flipped = 0.0;
        for (int i = 0; i < anticomm.rows(); ++i)
            flipped += anticomm.get(i, j) ? -alphas[i] : alphas[i];
        double gap = std::abs(total - flipped);
        min_gap = std::min(min_gap, gap);
        if (gap <= tol) {
            rep.satisfied = false;
            rep.details["violating_errors"].push_back(j);
        }
    }
    rep.residual = anticomm.cols() ? min_gap : 0.0;
    return rep;
}

// --- protected-chain spectra -----------------------------------------------------

// Eigenvalues of the sector-reduced chain penalty on N qubits:
//   -( sum_i X_i + s_x prod_i X_i + Z_1 + sum_i Z_i Z_{i+1} + s_z Z_N ).
// Each (s_x, s_z) sector of the 2N+2-qubit penalty carries this spectrum with
// multiplicity 2^N.
inline VectorXd chain_sector_spectrum(int N, int s_x, int s_z) {
    if (N < 1 || N > 14) throw std::invalid_argument("chain_sector_spectrum: N out of range");
    if (std::abs(s_x) != 1 || std::abs(s_z) != 1)
        throw std::invalid_argument("chain_sector_spectrum: sector signs must be +-1");
    Hamiltonian h(N);
    uint64_t all = (uint64_t{1} << N) - 1;
    for (int i = 1; i <= N; ++i) h.add(-1.0, PauliOperator::single(N, 'X', i));
    h.add(-static_cast<double>(s_x), PauliOperator(N, all, 0));
    h.add(-1.0, PauliOperator::single(N, 'Z', 1));
    for (int i = 1; i < N; ++i)
        h.add(-1.0, multiply(PauliOperator::single(N, 'Z', i), PauliOperator::single(N, 'Z', i + 1)));
    h.add(-static_cast<double>(s_z), PauliOperator::single(N, 'Z', N));
    return eigvalsh(h.to_dense(0.0));
}

// Full chain-penalty spectrum as (value, multiplicity) pairs, ascending, via
// the four sectors. Multiplicities sum to 2^(2N+2).
inline std::vector<std::pair<double, long long>> chain_penalty_spectrum_full(int N,
                                                                             double tol = 1e-9) {
    std::vector<double> vals;
    for (int sx : {1, -1})
        for (int sz : {1, -1}) {
            VectorXd v = chain_sector_spectrum(N, sx, sz);
            vals.insert(vals.end(), v.begin(), v.end());
        }
    std::sort(vals.begin(), vals.end());
    std::vector<std::pair<double, long long>> out;
    long long mult = 1LL << N;
    for (double v : vals) {
        if (!out.empty() && v - out.back().first <= tol)
            out.back().second += mult;
        else
            out.emplace_back(v, mult);
    }
    return out;
}

struct ChainGapRow {
    int N = 0;
    double ground = 0.0;
    double gap = 0.0;
    double gap_times_chain = 0.0;  // gap * (N + 1)
};

inline std::vector<ChainGapRow> chain_gap_scan(int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("chain_gap_scan: bad range");
    std::vector<ChainGapRow> rows;
    for (int N = n_min; N <= n_max; ++N) {
        auto spec = chain_penalty_spectrum_full(N);
        if (spec.size() < 2) throw std::runtime_error("chain_gap_scan: degenerate spectrum");
        ChainGapRow row;
        row.N = N;
        row.ground = spec[0].first;
        row.gap = spec[1].first - spec[0].first;
        row.gap_times_chain = row.gap * (N + 1);
        rows.push_back(row);
    }
    return rows;
}

// --- ground space inside the codespace --------------------------------------------

// Checks ||(I - P_C) Pi_ground|| <= tol. When every penalty term lies in the
// gauge group the check runs in the encoded slot picture on s + r qubits
// (the logical factor splits off), which reaches chain sizes the dense route
// cannot.
inline ConditionReport ground_in_codespace(const Hamiltonian& h_p, const SubsystemCode& code,
                                           double tol = 1e-9) {
    if (h_p.num_qubits != code.num_physical)
        throw std::invalid_argument("ground_in_codespace: qubit count mismatch");
    ConditionReport rep;
    rep.id = "ground_in_codespace";

    std::vector<uint64_t> gspan = detail::gauge_span_vectors(code);
    bool all_gauge = true;
    for (const auto& t : h_p.terms)
        if (!f2_in_span(gspan, 2 * code.num_physical, symplectic_vector(t.pauli))) {
            all_gauge = false;
            break;
        }

    int s = code.s(), r = code.r();
    if (all_gauge && s + r <= kDenseQubitLimit) {
        // slot picture: terms act as identity on the logical slots
        EncodingBasis eb = make_encoding_basis(code);
        int m = s + r;
        Hamiltonian slot_h(m);
        for (const auto& t : h_p.terms) {
            SlotPauli sp = unencode_pauli(eb, t.pauli);
            uint64_t keep = (uint64_t{1} << m) - 1;
            if ((sp.pauli.x_mask | sp.pauli.z_mask) & ~keep)
                throw std::runtime_error("ground_in_codespace: gauge term acts on logical slots");
            slot_h.add(t.coeff, PauliOperator(m, sp.pauli.x_mask, sp.pauli.z_mask,
                                              sp.pauli.phase_exponent));
        }
        MatrixXcd hd = slot_h.to_dense(0.0);
        SpectralDecomposition d = eigendecompose(hd);
        const MatrixXcd& pg = d.projectors.front();
        // codespace projector in slots: ancilla register fixed to |0...0>
        const Eigen::Index dim = Eigen::Index{1} << m;
        MatrixXcd q = MatrixXcd::Zero(dim, dim);  // I - P_C in slots
        const Eigen::Index anc_period = Eigen::Index{1} << (m - s);
        for (Eigen::Index i = 0; i < dim; ++i)
            if (i >= anc_period) q(i, i) = 1.0;  // any ancilla bit set
        rep.residual = spectral_norm(q * pg);
        rep.details["method"] = "slot";
        rep.details["ground_energy"] = d.eigenvalues.front();
        rep.details["ground_dimension"] =
            static_cast<long long>(std::llround(pg.trace().real())) * (1LL << code.k());
    } else {
        if (code.num_physical > kDenseQubitLimit)
            throw std::invalid_argument("ground_in_codespace: dense limit exceeded");
        MatrixXcd hd = h_p.to_dense(0.0);
        SpectralDecomposition d = eigendecompose(hd);
        const MatrixXcd& pg = d.projectors.front();
        MatrixXcd pc = codespace_projector(code);
        const Eigen::Index dim = hd.rows();
        rep.residual = spectral_norm((MatrixXcd::Identity(dim, dim) - pc) * pg);
        rep.details["method"] = "dense";
        rep.details["ground_energy"] = d.eigenvalues.front();
        rep.details["ground_dimension"] =
            static_cast<long long>(std::llround(pg.trace().real()));
    }
    rep.satisfied = rep.residual <= tol;
    return rep;
}

}  // namespace subpen
