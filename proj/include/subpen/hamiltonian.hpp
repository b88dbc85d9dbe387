#pragma once

// Hermitian operators as real-weighted Pauli sums, with optional named
// schedule groups: weight(s) in {1, 1-s, s} selected per term group.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subpen/linalg.hpp"
#include "subpen/pauli.hpp"

namespace subpen {

struct HamiltonianTerm {
    double coeff = 0.0;
    PauliOperator pauli;
    std::string group;  // "" or "const" = weight 1; "one_minus_s"; "s"
};

inline double schedule_weight(const std::string& group, double s) {
    if (group.empty() || group == "const") return 1.0;
    if (group == "one_minus_s") return 1.0 - s;
    if (group == "s") return s;
    throw std::invalid_argument("unknown schedule group: " + group);
}

struct Hamiltonian {
    int num_qubits = 0;
    std::vector<HamiltonianTerm> terms;

    Hamiltonian() = default;
    explicit Hamiltonian(int n) : num_qubits(n) {}

    void add(double coeff, const PauliOperator& p, const std::string& group = "") {
        if (num_qubits == 0) num_qubits = p.num_qubits;
        if (p.num_qubits != num_qubits)
            throw std::invalid_argument("Hamiltonian::add: qubit count mismatch");
        if (!p.is_hermitian())
            throw std::invalid_argument("Hamiltonian::add: non-Hermitian Pauli term");
        schedule_weight(group, 0.0);  // validate the group name
        // fold the +-1 sign into the coefficient
        HamiltonianTerm t{coeff * p.sign(), PauliOperator(p.num_qubits, p.x_mask, p.z_mask, 0), group};
        terms.push_back(std::move(t));
    }

    bool is_schedule_constant() const {
        for (const auto& t : terms)
            if (!t.group.empty() && t.group != "const") return false;
        return true;
    }

    MatrixXcd to_dense(double s = 0.0) const {
        if (num_qubits > kDenseQubitLimit)
            throw std::invalid_argument("Hamiltonian::to_dense: dense limit exceeded");
        const Eigen::Index dim = Eigen::Index{1} << num_qubits;
        MatrixXcd m = MatrixXcd::Zero(dim, dim);
        for (const auto& t : terms) {
            double w = t.coeff * schedule_weight(t.group, s);
            if (w != 0.0) m += w * subpen::to_dense(t.pauli);
        }
        return m;
    }

    // out += H(s) |in>, without forming a dense matrix.
    void apply(double s, const VectorXcd& in, VectorXcd& out) const {
        out.setZero(in.size());
        VectorXcd tmp(in.size());
        for (const auto& t : terms) {
            double w = t.coeff * schedule_weight(t.group, s);
            if (w == 0.0) continue;
            apply_pauli(t.pauli, in, tmp);
            out += w * tmp;
        }
    }

    // Embeds each term into a larger register, with this operator's qubits
    // starting after `shift` qubits (qubit j -> qubit j + shift).
    Hamiltonian embedded(int total_qubits, int shift = 0) const {
        Hamiltonian h(total_qubits);
        for (const auto& t : terms) {
            PauliOperator p(total_qubits, t.pauli.x_mask << shift, t.pauli.z_mask << shift,
                            t.pauli.phase_exponent);
            h.terms.push_back({t.coeff, p, t.group});
        }
        return h;
    }

    double coefficient_one_norm() const {
        double s = 0;
        for (const auto& t : terms) s += std::abs(t.coeff);
        return s;
    }
};

inline PauliOperator embed_pauli(const PauliOperator& p, int total_qubits, int shift = 0) {
    return PauliOperator(total_qubits, p.x_mask << shift, p.z_mask << shift, p.phase_exponent);
}

// JSON form: [{"coeff": c, "pauli": "X1 Z3", "group": "s"}, ...]
inline nlohmann::json hamiltonian_to_json(const Hamiltonian& h) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : h.terms) {
        nlohmann::json jt;
        jt["coeff"] = t.coeff;
        jt["pauli"] = to_sparse_string(t.pauli);
        jt["group"] = t.group;
        terms.push_back(jt);
    }
    nlohmann::json j;
    j["num_qubits"] = h.num_qubits;
    j["terms"] = terms;
    return j;
}

inline Hamiltonian hamiltonian_from_json(const nlohmann::json& j) {
    Hamiltonian h(j.at("num_qubits").get<int>());
    for (const auto& jt : j.at("terms")) {
        std::string group = jt.contains("group") ? jt.at("group").get<std::string>() : "";
        h.add(jt.at("coeff").get<double>(),
              parse_pauli(jt.at("pauli").get<std::string>(), h.num_qubits), group);
    }
    return h;
}

}  // namespace subpen
