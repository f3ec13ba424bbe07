#pragma once

// Reconstructed density-matrix elements: the data model shared between the
// counting-side estimators and the certification bounds.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pathcert/errors.hpp"

namespace pathcert::elements {

/// Flat index of the unordered pair (i, j), i < j, within a d-dim arm.
inline int pair_index(int i, int j, int d) {
    if (i < 0 || j <= i || j >= d) throw ValidationError("invalid-index: pair needs 0 <= i < j < d");
    return i * d - i * (i + 1) / 2 + (j - i - 1);
}

inline int pair_count(int d) { return d * (d - 1) / 2; }

struct DiagonalData {
    int d = 0;
    Eigen::MatrixXd p_ab;       // p_ab(i,j) = estimated <ij|rho|ij>
    bool cross_measured = false;  // true when the full d*d grid was measured

    double p_same(int i) const { return p_ab(i, i); }
    /// N = sum_i <ii|rho|ii>.
    double normalization() const {
        double n = 0.0;
        for (int i = 0; i < d; ++i) n += p_ab(i, i);
        return n;
    }
    void validate() const {
        if (d < 2 || p_ab.rows() != d || p_ab.cols() != d)
            throw ValidationError("invalid-dimension: diagonal data shape mismatch");
        if (p_ab.minCoeff() < -1e-12)
            throw ValidationError("degenerate-input: negative population estimate");
        if (normalization() > 1.0 + 1e-9)
            throw ValidationError("degenerate-input: diagonal populations sum beyond 1");
    }
};

struct OffDiagonalData {
    int d = 0;
    std::vector<double> re;                 // Re<ii|rho|jj> per pair_index
    std::optional<std::vector<double>> im;  // present only when mixed settings were measured

    double real_part(int i, int j) const { return re[pair_index(i, j, d)]; }
    void validate() const {
        if (d < 2 || static_cast<int>(re.size()) != pair_count(d))
            throw ValidationError("invalid-dimension: off-diagonal data must cover all pairs");
        if (im && im->size() != re.size())
            throw ValidationError("invalid-dimension: imaginary parts must cover all pairs when present");
    }
};

}
