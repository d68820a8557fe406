#include "quadtherm/matrix_exp.hpp"

#include <cmath>
#include <stdexcept>

namespace quadtherm {

namespace {

double inf_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

Eigen::MatrixXd matrix_expm1(const Eigen::MatrixXd& x, double term_tol) {
    if (x.rows() != x.cols()) {
        throw std::invalid_argument("matrix_expm1: matrix must be square");
    }
    const auto n = x.rows();
    if (n == 0) return Eigen::MatrixXd(0, 0);

    // Scale so the series argument has infinity norm <= 0.5.
    const double norm = inf_norm(x);
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const Eigen::MatrixXd y = x / std::ldexp(1.0, squarings);

    // E = y + y^2/2! + y^3/3! + ...
    Eigen::MatrixXd e = y;
    Eigen::MatrixXd term = y;
    constexpr int kMaxTerms = 64;
    for (int k = 2; k <= kMaxTerms; ++k) {
        term = (term * y) / static_cast<double>(k);
        e += term;
        if (inf_norm(term) <= term_tol * std::max(1.0, inf_norm(e))) break;
    }

    // Undo the scaling: E(2y) = E(y)^2 + 2 E(y).
    for (int s = 0; s < squarings; ++s) {
        e = (e * e).eval() + 2.0 * e;
    }
    return e;
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x, double term_tol) {
    Eigen::MatrixXd e = matrix_expm1(x, term_tol);
    e.diagonal().array() += 1.0;
    return e;
}

}  // namespace quadtherm
