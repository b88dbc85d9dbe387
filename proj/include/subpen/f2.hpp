#pragma once

// Linear algebra over F2 with rows packed into 64-bit words.
// Sized for the workloads in this library: A-matrices are tiny and
// symplectic systems have at most 2n <= 128 columns in principle, but
// everything we construct densely stays within one word (n <= 64 / 2n <= 64
// columns is enforced at construction).

#include <cstdint>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace subpen {

class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows, 0) {
        if (rows < 0 || cols < 0 || cols > 64)
            throw std::invalid_argument("BinaryMatrix: need 0 <= cols <= 64");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const { return (data_[r] >> c) & 1u; }
    void set(int r, int c, bool v) {
        if (v) data_[r] |= (uint64_t{1} << c);
        else   data_[r] &= ~(uint64_t{1} << c);
    }
    uint64_t row(int r) const { return data_[r]; }
    void set_row(int r, uint64_t bits) { data_[r] = bits & mask(); }
    void append_row(uint64_t bits) { data_.push_back(bits & mask()); ++rows_; }

    uint64_t mask() const { return cols_ == 64 ? ~uint64_t{0} : (uint64_t{1} << cols_) - 1; }

    bool operator==(const BinaryMatrix&) const = default;

    static BinaryMatrix identity(int n) {
        BinaryMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    // Plain text format: one row per line, characters '0'/'1'
    // (whitespace between entries tolerated).
    static BinaryMatrix parse(const std::string& text) {
        std::vector<uint64_t> rows;
        int cols = -1;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            uint64_t bits = 0;
            int c = 0;
            for (char ch : line) {
                if (ch == '0' || ch == '1') {
                    if (c >= 64) throw std::invalid_argument("BinaryMatrix::parse: more than 64 columns");
                    if (ch == '1') bits |= uint64_t{1} << c;
                    ++c;
                } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                    throw std::invalid_argument("BinaryMatrix::parse: unexpected character");
                }
            }
            if (c == 0) continue;
            if (cols == -1) cols = c;
            else if (c != cols) throw std::invalid_argument("BinaryMatrix::parse: ragged rows");
            rows.push_back(bits);
        }
        if (cols <= 0) throw std::invalid_argument("BinaryMatrix::parse: empty matrix");
        BinaryMatrix m(static_cast<int>(rows.size()), cols);
        m.data_ = rows;
        return m;
    }

    static BinaryMatrix load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open A-matrix file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    std::string to_string() const {
        std::string s;
        for (int r = 0; r < rows_; ++r) {
            for (int c = 0; c < cols_; ++c) s += get(r, c) ? '1' : '0';
            s += '\n';
        }
        return s;
    }

    int weight() const {
        int w = 0;
        for (uint64_t r : data_) w += std::popcount(r);
        return w;
    }

    BinaryMatrix transposed() const {
        BinaryMatrix t(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                if (get(r, c)) t.set(c, r, true);
        return t;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<uint64_t> data_;
};

// Gaussian elimination over F2; rank of m.
inline int f2_rank(const BinaryMatrix& m) {
    std::vector<uint64_t> rows;
    rows.reserve(m.rows());
    for (int r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    int rank = 0;
    for (int c = 0; c < m.cols() && rank < static_cast<int>(rows.size()); ++c) {
        uint64_t bit = uint64_t{1} << c;
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r] & bit) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

// Basis for the kernel {x : m x = 0}, one packed vector per basis element
// (bit c of the result = component x_c).
inline std::vector<uint64_t> f2_kernel_basis(const BinaryMatrix& m) {
    int nc = m.cols();
    std::vector<uint64_t> rows;
    for (int r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < nc && rank < static_cast<int>(rows.size()); ++c) {
        uint64_t bit = uint64_t{1} << c;
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r] & bit) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && (rows[r] & bit)) rows[r] ^= rows[rank];
        pivot_col.push_back(c);
        ++rank;
    }
    std::vector<bool> is_pivot(nc, false);
    for (int c : pivot_col) is_pivot[c] = true;
    std::vector<uint64_t> basis;
    for (int c = 0; c < nc; ++c) {
        if (is_pivot[c]) continue;
        uint64_t v = uint64_t{1} << c;
        for (int r = 0; r < rank; ++r)
            if (rows[r] & (uint64_t{1} << c)) v |= uint64_t{1} << pivot_col[r];
        basis.push_back(v);
    }
    return basis;
}

// Solve m x = b. Returns false if inconsistent; x receives one solution.
inline bool f2_solve(const BinaryMatrix& m, uint64_t b, uint64_t& x) {
    int nc = m.cols();
    std::vector<uint64_t> rows;
    std::vector<uint64_t> rhs;
    for (int r = 0; r < m.rows(); ++r) { rows.push_back(m.row(r)); rhs.push_back((b >> r) & 1u); }
    std::vector<int> pivot_col;
    int rank = 0;
    for (int c = 0; c < nc && rank < static_cast<int>(rows.size()); ++c) {
        uint64_t bit = uint64_t{1} << c;
        int pivot = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r] & bit) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        std::swap(rhs[rank], rhs[pivot]);
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            if (r != rank && (rows[r] & bit)) { rows[r] ^= rows[rank]; rhs[r] ^= rhs[rank]; }
        pivot_col.push_back(c);
        ++rank;
    }
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
        if (rhs[r]) return false;
    x = 0;
    for (int r = 0; r < rank; ++r)
        if (rhs[r]) x |= uint64_t{1} << pivot_col[r];
    return true;
}

// Minimum Hamming weight over all nonzero F2 combinations of the rows.
// Brute force over 2^rows; callers keep rows <= 20.
inline int min_nonzero_weight_rowspace(const BinaryMatrix& m) {
    if (m.rows() > 20) throw std::invalid_argument("min_nonzero_weight_rowspace: too many rows (max 20)");
    int best = -1;
    int nr = m.rows();
    // Gray-code walk so each step XORs a single row.
    uint64_t v = 0;
    uint64_t prev_gray = 0;
    for (uint64_t i = 1; i < (uint64_t{1} << nr); ++i) {
        uint64_t gray = i ^ (i >> 1);
        uint64_t changed = gray ^ prev_gray;
        v ^= m.row(std::countr_zero(changed));
        prev_gray = gray;
        if (v == 0) continue;
        int w = std::popcount(v);
        if (best < 0 || w < best) best = w;
    }
    if (best < 0) best = 0;  // all-zero row space
    return best;
}

// Membership of a packed vector in the span of the given rows.
inline bool f2_in_span(const std::vector<uint64_t>& span_rows, int cols, uint64_t v) {
    BinaryMatrix m(0, cols);
    for (uint64_t r : span_rows) m.append_row(r);
    int base = f2_rank(m);
    m.append_row(v);
    return f2_rank(m) == base;
}

}  // namespace subpen
