#pragma once

// System-bath dynamics: time-ordered propagators, the theorem target
// unitaries, the interaction-picture kernel K(t) with its analytic spectral
// form, the closed-form error bounds, the block-local bound, the gauge-blind
// semi-distance, and penalty-strength sweeps.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "subpen/code.hpp"
#include "subpen/encoding.hpp"
#include "subpen/hamiltonian.hpp"
#include "subpen/linalg.hpp"
#include "subpen/spectra.hpp"

namespace subpen {

struct TimeGrid {
    double total_time = 1.0;
    int num_steps = 400;
    // linear default schedule
    double s_at(double t) const { return total_time > 0 ? t / total_time : 0.0; }
};

struct InteractionTerm {
    PauliOperator system_op;  // acts on the (encoded) system register
    MatrixXcd bath_op;        // Hermitian, on the bath register
};

struct SystemBathModel {
    Hamiltonian system;   // Hbar_S(s), already encoded
    int bath_qubits = 0;  // bath register size; 0 = closed system
    MatrixXcd bath;       // H_B; empty matrix means zero
    std::vector<InteractionTerm> interaction;
    Hamiltonian penalty;  // H_p on the system register
    double penalty_strength = 0.0;
    double total_time = 1.0;

    int system_qubits() const { return system.num_qubits; }
    int total_qubits() const { return system.num_qubits + bath_qubits; }
    Eigen::Index bath_dim() const { return Eigen::Index{1} << bath_qubits; }
    Eigen::Index dim() const { return Eigen::Index{1} << total_qubits(); }

    MatrixXcd bath_dense() const {
        if (bath.size() == 0) return MatrixXcd::Zero(bath_dim(), bath_dim());
        if (bath.rows() != bath_dim())
            throw std::invalid_argument("SystemBathModel: bath dimension mismatch");
        return bath;
    }
    // H_0(s) = Hbar_S(s) (x) I_B + I_S (x) H_B
    MatrixXcd h0(double s) const {
        Eigen::Index sd = Eigen::Index{1} << system_qubits();
        MatrixXcd hs = system.to_dense(s);
        MatrixXcd out = kron(hs, MatrixXcd::Identity(bath_dim(), bath_dim()));
        if (bath_qubits) out += kron(MatrixXcd::Identity(sd, sd), bath_dense());
        return out;
    }
    MatrixXcd v() const {
        MatrixXcd out = MatrixXcd::Zero(dim(), dim());
        for (const auto& term : interaction) {
            if (term.system_op.num_qubits != system_qubits())
                throw std::invalid_argument("SystemBathModel: interaction register mismatch");
            if (hermiticity_defect(term.bath_op) > 1e-10)
                throw std::invalid_argument("SystemBathModel: bath coupling not Hermitian");
            MatrixXcd b = bath_qubits ? term.bath_op : MatrixXcd::Identity(1, 1);
            out += kron(to_dense(term.system_op), b);
        }
        return out;
    }
    // E_p * H_p (x) I_B
    MatrixXcd penalty_dense() const {
        return penalty_strength *
               kron(penalty.to_dense(0.0), MatrixXcd::Identity(bath_dim(), bath_dim()));
    }
    bool is_time_independent() const { return system.is_schedule_constant(); }
};

// --- propagators ------------------------------------------------------------------

// Time-ordered exponential by midpoint piecewise-constant steps.
inline MatrixXcd evolve(const std::function<MatrixXcd(double)>& h_of_t, const TimeGrid& grid,
                        bool constant = false) {
    if (grid.num_steps < 1) throw std::invalid_argument("evolve: steps >= 1 required");
    if (constant) return hermitian_propagator(h_of_t(0.5 * grid.total_time), grid.total_time);
    double dt = grid.total_time / grid.num_steps;
    MatrixXcd u;
    for (int k = 0; k < grid.num_steps; ++k) {
        MatrixXcd h = h_of_t((k + 0.5) * dt);
        if (hermiticity_defect(h) > 1e-10) throw std::invalid_argument("evolve: non-Hermitian sample");
        MatrixXcd step = hermitian_propagator(h, dt);
        u = k == 0 ? step : MatrixXcd(step * u);
    }
    return u;
}

inline MatrixXcd evolve_full(const SystemBathModel& m, const TimeGrid& grid) {
    MatrixXcd pen = m.penalty_dense();
    MatrixXcd vv = m.v();
    return evolve([&](double t) -> MatrixXcd { return m.h0(grid.s_at(t)) + pen + vv; }, grid,
                  m.is_time_independent());
}

inline MatrixXcd evolve_h0(const SystemBathModel& m, const TimeGrid& grid) {
    return evolve([&](double t) -> MatrixXcd { return m.h0(grid.s_at(t)); }, grid, m.is_time_independent());
}

// exp(-i T E_p H_p) extended over the bath; exact (penalty is constant).
inline MatrixXcd evolve_penalty(const SystemBathModel& m) {
    return hermitian_propagator(m.penalty_dense(), m.total_time);
}

// --- theorem targets ----------------------------------------------------------------

// U_W(T) = exp(-icT) U_0(T) U_p(T)
inline MatrixXcd target_unitary_theorem1(const SystemBathModel& m, const TimeGrid& grid, double c) {
    std::complex<double> phase = std::exp(std::complex<double>(0.0, -c * grid.total_time));
    return phase * (evolve_h0(m, grid) * evolve_penalty(m)).eval();
}

// Penalty spectral projectors extended over the bath register.
inline std::vector<MatrixXcd> extended_projectors(const SystemBathModel& m,
                                                  const SpectralDecomposition& pd) {
    std::vector<MatrixXcd> out;
    MatrixXcd ib = MatrixXcd::Identity(m.bath_dim(), m.bath_dim());
    for (const auto& pi : pd.projectors) out.push_back(kron(pi, ib));
    return out;
}

// W = Sum_{a in I} Pi_a V Pi_a.
inline MatrixXcd dephased_interaction(const SystemBathModel& m, const SpectralDecomposition& pd,
                                      const std::vector<int>& index_set) {
    MatrixXcd vv = m.v();
    MatrixXcd w = MatrixXcd::Zero(m.dim(), m.dim());
    std::vector<MatrixXcd> pis = extended_projectors(m, pd);
    for (int a : index_set) {
        if (a < 0 || a >= static_cast<int>(pis.size()))
            throw std::invalid_argument("dephased_interaction: bad sector index");
        w += pis[a] * vv * pis[a];
    }
    return w;
}

// Evolves H_0(t) + E_p H_p + W; checks that P = Sum_{a in I} Pi_a.
inline MatrixXcd target_unitary_theorem2(const SystemBathModel& m, const TimeGrid& grid,
                                         const std::vector<int>& index_set,
                                         const SpectralDecomposition& pd, const MatrixXcd& p) {
    std::vector<MatrixXcd> pis = extended_projectors(m, pd);
    MatrixXcd psum = MatrixXcd::Zero(m.dim(), m.dim());
    for (int a : index_set) psum += pis.at(a);
    if (spectral_norm(psum - p) > 1e-8)
        throw std::invalid_argument("target_unitary_theorem2: index set does not reproduce P");
    MatrixXcd w = dephased_interaction(m, pd, index_set);
    MatrixXcd pen = m.penalty_dense();
    return evolve([&](double t) -> MatrixXcd { return m.h0(grid.s_at(t)) + pen + w; }, grid,
                  m.is_time_independent());
}

inline double deviation(const MatrixXcd& u_v, const MatrixXcd& u_w, const MatrixXcd& p) {
    return spectral_norm((u_v - u_w) * p);
}

// --- the kernel K(t) and the closed-form bounds ----------------------------------------

struct KData {
    std::vector<double> times;
    std::vector<MatrixXcd> k;
    double sup_norm = 0.0;
    double final_norm = 0.0;  // ||K(T)||
    double diagonal_residual = 0.0;
};

// Analytic spectral form:
//   K(t) = Sum_{a != a'} (exp(i(l_a - l_a')E_p t) - 1)/((l_a - l_a')E_p)
//            * Pi_a (V - W) Pi_a' P.
// Requires the diagonal blocks Sum_a Pi_a (V - W) Pi_a P to vanish.
inline KData compute_K(const SystemBathModel& m, const MatrixXcd& w, const MatrixXcd& p,
                       const SpectralDecomposition& pd, const std::vector<double>& times,
                       double diag_tol = 1e-8) {
    if (m.penalty_strength <= 0) throw std::invalid_argument("compute_K: penalty strength must be > 0");
    MatrixXcd dv = m.v() - w;
    std::vector<MatrixXcd> pis = extended_projectors(m, pd);
    size_t na = pis.size();
    MatrixXcd diag = MatrixXcd::Zero(m.dim(), m.dim());
    for (const auto& pi : pis) diag += pi * dv * pi * p;
    KData out;
    out.diagonal_residual = spectral_norm(diag);
    if (out.diagonal_residual > diag_tol)
        throw std::invalid_argument("compute_K: surviving diagonal blocks");
    std::vector<MatrixXcd> blocks;   // Pi_a dv Pi_a' P for a != a'
    std::vector<double> gaps;        // (l_a - l_a') * E_p
    for (size_t a = 0; a < na; ++a)
        for (size_t b = 0; b < na; ++b) {
            if (a == b) continue;
            MatrixXcd blk = pis[a] * dv * pis[b] * p;
            if (spectral_norm(blk) < 1e-14) continue;
            blocks.push_back(blk);
            gaps.push_back((pd.eigenvalues[a] - pd.eigenvalues[b]) * m.penalty_strength);
        }
    out.times = times;
    for (double t : times) {
        MatrixXcd k = MatrixXcd::Zero(m.dim(), m.dim());
        for (size_t i = 0; i < blocks.size(); ++i) {
            // integral of exp(i g tau) from 0 to t = (exp(i g t) - 1) / (i g)
            std::complex<double> f = (std::exp(std::complex<double>(0.0, gaps[i] * t)) - 1.0) /
                                     std::complex<double>(0.0, gaps[i]);
            k += f * blocks[i];
        }
        double nk = spectral_norm(k);
        out.sup_norm = std::max(out.sup_norm, nk);
        out.k.push_back(std::move(k));
        if (t == times.back()) out.final_norm = nk;
    }
    return out;
}

// Simpson quadrature of K(t) = int_0^t U_p^dag(tau) (V - W) U_p(tau) P dtau,
// the independent cross-check of the analytic form.
inline MatrixXcd compute_K_quadrature(const SystemBathModel& m, const MatrixXcd& w,
                                      const MatrixXcd& p, double t, int steps = 2000) {
    if (steps % 2) ++steps;
    MatrixXcd dv = m.v() - w;
    MatrixXcd pen = m.penalty_dense();
    double h = t / steps;
    MatrixXcd acc = MatrixXcd::Zero(m.dim(), m.dim());
    for (int i = 0; i <= steps; ++i) {
        MatrixXcd up = hermitian_propagator(pen, i * h);
        MatrixXcd f = up.adjoint() * dv * up * p;
        double wgt = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wgt * f;
    }
    return (h / 3.0) * acc;
}

// Eq. (5a): ||K(T)|| + T sup_t ||[K(t), H_0(t)]|| + T (||V|| + ||W||) sup_t ||K(t)||.
// sup over the supplied sample times.
inline double bound_eq5a(const SystemBathModel& m, const TimeGrid& grid, const KData& kd,
                         const MatrixXcd& w) {
    double t_total = grid.total_time;
    double sup_comm = 0.0;
    for (size_t i = 0; i < kd.times.size(); ++i) {
        MatrixXcd h0 = m.h0(grid.s_at(kd.times[i]));
        sup_comm = std::max(sup_comm, spectral_norm(kd.k[i] * h0 - h0 * kd.k[i]));
    }
    double vn = spectral_norm(m.v());
    double wn = spectral_norm(w);
    return kd.final_norm + t_total * sup_comm + t_total * (vn + wn) * kd.sup_norm;
}

// Eq. (5b): (2 / E_p) Sum_{a != a'} ||V - W|| / |l_a - l_a'|, ordered pairs.
inline double bound_eq5b(double v_minus_w_norm, const std::vector<double>& distinct_eigenvalues,
                         double e_p) {
    if (e_p <= 0) throw std::invalid_argument("bound_eq5b: penalty strength must be > 0");
    double acc = 0.0;
    size_t na = distinct_eigenvalues.size();
    for (size_t a = 0; a < na; ++a)
        for (size_t b = 0; b < na; ++b) {
            if (a == b) continue;
            acc += v_minus_w_norm / std::abs(distinct_eigenvalues[a] - distinct_eigenvalues[b]);
        }
    return 2.0 * acc / e_p;
}

// --- block-local bound -----------------------------------------------------------------

// One block-local noise term: v_j, w_j and the norms of the system/bath
// Hamiltonian pieces sharing its support. All matrices live on the block's
// local space (block system register (x) locally coupled bath).
struct BlockNoiseTerm {
    MatrixXcd v;
    MatrixXcd w;
    double h_s_norm = 0.0;  // ||hbar_S,j|| on the term's support
    double h_b_norm = 0.0;  // ||h_B,j|| on the coupled bath part
};

struct BoundBlock {
    MatrixXcd penalty;  // block penalty, same local space as the terms
    MatrixXcd p;        // block code projector, same local space
    std::vector<BlockNoiseTerm> terms;
    uint64_t support = 0;  // physical qubits of the block, for disjointness
};

// Per-block evaluation of the locality-respecting bound: each term pays
//   kappa_j * (1 + T (||v_block|| + ||w_block||) + 2T (||h_S,j|| + ||h_B,j||))
// with kappa_j the closed-form kernel bound from the block penalty spectrum.
// All norms are local to the block, so the value is additive over independent
// blocks and blind to uncoupled bath enlargement.
inline double block_bounds(const std::vector<BoundBlock>& blocks, double e_p, double total_time,
                           double diag_tol = 1e-8) {
    uint64_t seen = 0;
    double total = 0.0;
    for (const auto& blk : blocks) {
        if (blk.support & seen)
            throw std::invalid_argument("block_bounds: overlapping block supports");
        seen |= blk.support;
        SpectralDecomposition d = eigendecompose(blk.penalty);
        MatrixXcd vsum = MatrixXcd::Zero(blk.penalty.rows(), blk.penalty.cols());
        MatrixXcd wsum = vsum;
        for (const auto& t : blk.terms) {
            vsum += t.v;
            wsum += t.w;
        }
        double vb = spectral_norm(vsum), wb = spectral_norm(wsum);
        for (const auto& t : blk.terms) {
            MatrixXcd dv = t.v - t.w;
            MatrixXcd diag = MatrixXcd::Zero(dv.rows(), dv.cols());
            for (const auto& pi : d.projectors) diag += pi * dv * pi * blk.p;
            if (spectral_norm(diag) > diag_tol)
                throw std::invalid_argument("block_bounds: surviving diagonal blocks in a term");
            // kappa_j = (2/E_p) sum_{a != a'} ||v_j - w_j|| / |e_a - e_a'|
            double kappa = bound_eq5b(spectral_norm(dv), d.eigenvalues, e_p);
            total += kappa * (1.0 + total_time * (vb + wb) +
                              2.0 * total_time * (t.h_s_norm + t.h_b_norm));
        }
    }
    return total;
}

// --- semi-distance ------------------------------------------------------------------------

// d(rho, sigma) = 1/2 || Tr_{anc,gauge} U^dag P_C rho P_C U  -  (same for sigma) ||_1:
// trace distance of the logical content, blind to gauge dynamics and leakage.
inline double semi_distance(const MatrixXcd& rho, const MatrixXcd& sigma,
                            const SubsystemCode& code, const MatrixXcd& u_enc,
                            double tol = 1e-8) {
    int n = code.num_physical;
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (rho.rows() != dim || sigma.rows() != dim)
        throw std::invalid_argument("semi_distance: dimension mismatch");
    for (const MatrixXcd* m : {&rho, &sigma}) {
        if (hermiticity_defect(*m) > tol)
            throw std::invalid_argument("semi_distance: not a density operator (Hermiticity)");
        if (m->trace().real() > 1.0 + 1e-6)
            throw std::invalid_argument("semi_distance: trace exceeds one");
        VectorXd ev = eigvalsh(*m);
        if (ev.minCoeff() < -1e-8)
            throw std::invalid_argument("semi_distance: not positive semidefinite");
    }
    MatrixXcd pc = codespace_projector(code);
    std::vector<int> traced;
    for (int q = 1; q <= code.s() + code.r(); ++q) traced.push_back(q);
    auto logical_part = [&](const MatrixXcd& m) {
        MatrixXcd slot = u_enc.adjoint() * (pc * m * pc) * u_enc;
        return partial_trace(slot, n, traced);
    };
    return 0.5 * trace_norm(logical_part(rho) - logical_part(sigma));
}

// --- penalty sweeps ------------------------------------------------------------------------

struct SweepPoint {
    double e_p = 0.0;
    double deviation = 0.0;
    double bound_5a = 0.0;
    double bound_5b = 0.0;
    double sup_k = 0.0;
    double semi_dist = 0.0;
    int steps = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double slope = 0.0;  // log-log fit of deviation vs E_p over points with E_p > 0
};

// Evolves the model at each penalty strength against the Theorem 2 target for
// the given sector index set, recording deviation, bounds, and (when an
// initial full-register state is supplied together with the encoding) the
// logical semi-distance of the reduced system states.
inline SweepResult penalty_sweep(SystemBathModel model, const std::vector<double>& e_p_values,
                                 TimeGrid grid, const std::vector<int>& index_set = {0},
                                 const std::optional<VectorXcd>& initial_state = std::nullopt,
                                 const SubsystemCode* code = nullptr,
                                 const MatrixXcd* u_enc = nullptr,
                                 int k_samples = 48) {
    SpectralDecomposition pd = eigendecompose(model.penalty.to_dense(0.0));
    std::vector<MatrixXcd> pis = extended_projectors(model, pd);
    MatrixXcd p = MatrixXcd::Zero(model.dim(), model.dim());
    for (int a : index_set) p += pis.at(a);

    std::vector<int> bath_tracer;
    for (int q = model.system_qubits() + 1; q <= model.total_qubits(); ++q)
        bath_tracer.push_back(q);

    SweepResult out;
    for (double ep : e_p_values) {
        SystemBathModel m = model;
        m.penalty_strength = ep;
        m.total_time = grid.total_time;
        TimeGrid g = grid;
        if (!m.is_time_independent())
            g.num_steps = static_cast<int>(grid.num_steps *
                                           std::max(1.0, ep * grid.total_time / 10.0));
        SweepPoint pt;
        pt.e_p = ep;
        pt.steps = m.is_time_independent() ? 1 : g.num_steps;
        MatrixXcd uv = evolve_full(m, g);
        MatrixXcd w = dephased_interaction(m, pd, index_set);
        MatrixXcd uw = target_unitary_theorem2(m, g, index_set, pd, p);
        pt.deviation = deviation(uv, uw, p);
        if (ep > 0) {
            std::vector<double> times;
            for (int i = 1; i <= k_samples; ++i)
                times.push_back(grid.total_time * i / k_samples);
            KData kd = compute_K(m, w, p, pd, times);
            pt.sup_k = kd.sup_norm;
            pt.bound_5a = bound_eq5a(m, g, kd, w);
            pt.bound_5b = bound_eq5b(spectral_norm(m.v() - w), pd.eigenvalues, ep);
        }
        if (initial_state && code && u_enc) {
            VectorXcd psi_v = uv * *initial_state;
            VectorXcd psi_w = uw * *initial_state;
            MatrixXcd rho_v = partial_trace(psi_v * psi_v.adjoint(), m.total_qubits(), bath_tracer);
            MatrixXcd rho_w = partial_trace(psi_w * psi_w.adjoint(), m.total_qubits(), bath_tracer);
            pt.semi_dist = semi_distance(rho_v, rho_w, *code, *u_enc);
        }
        out.points.push_back(pt);
    }
    // least-squares log-log slope over strictly positive deviations
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& pt : out.points) {
        if (pt.e_p <= 0 || pt.deviation <= 0) continue;
        double x = std::log(pt.e_p), y = std::log(pt.deviation);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) out.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return out;
}

// Initial state |0...0>_anc (x) |gauge penalty ground> (x) |logical>, mapped
// through the encoding and extended by a bath basis state. The gauge ground
// configuration comes from the slot-picture penalty, so the state lies in the
// penalty's ground sector when the penalty ground space is in the codespace.
inline VectorXcd ground_sector_state(const SubsystemCode& code, const EncodingBasis& eb,
                                     const MatrixXcd& u_enc, const Hamiltonian& penalty,
                                     const VectorXcd& logical_state, int bath_qubits = 0) {
    int s = code.s(), r = code.r(), k = code.k();
    int m = s + r;
    if (logical_state.size() != (Eigen::Index{1} << k))
        throw std::invalid_argument("ground_sector_state: logical state dimension");
    // slot penalty on ancilla+gauge slots
    Hamiltonian slot_h(m);
    for (const auto& t : penalty.terms) {
        SlotPauli sp = unencode_pauli(eb, t.pauli);
        uint64_t keep = (uint64_t{1} << m) - 1;
        if ((sp.pauli.x_mask | sp.pauli.z_mask) & ~keep)
            throw std::invalid_argument("ground_sector_state: penalty acts on logical slots");
        slot_h.add(t.coeff,
                   PauliOperator(m, sp.pauli.x_mask, sp.pauli.z_mask, sp.pauli.phase_exponent));
    }
    EighResult e = eigh(slot_h.to_dense(0.0));
    // ground vector with the ancilla register forced to |0...0>
    const Eigen::Index anc_period = Eigen::Index{1} << r;
    VectorXcd g = e.eigenvectors.col(0);
    for (Eigen::Index i = anc_period; i < g.size(); ++i)
        if (std::abs(g[i]) > 1e-9)
            throw std::invalid_argument("ground_sector_state: penalty ground leaves the codespace");
    VectorXcd slot_state = VectorXcd::Zero(Eigen::Index{1} << code.num_physical);
    const Eigen::Index log_dim = Eigen::Index{1} << k;
    for (Eigen::Index i = 0; i < anc_period; ++i)
        for (Eigen::Index l = 0; l < log_dim; ++l)
            slot_state[i * log_dim + l] = g[i] * logical_state[l];
    VectorXcd phys = u_enc * slot_state;
    if (!bath_qubits) return phys;
    VectorXcd bath0 = VectorXcd::Zero(Eigen::Index{1} << bath_qubits);
    bath0[0] = 1.0;
    VectorXcd full = VectorXcd::Zero(phys.size() * bath0.size());
    for (Eigen::Index i = 0; i < phys.size(); ++i) full[i * bath0.size()] = phys[i];
    return full;
}

}  // namespace subpen
