#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "secbeam/ipm.hpp"

namespace secbeam::conic {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Affine real scalar expression over the program's flat variable vector.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(double constant) : const_(constant) {}  // NOLINT: implicit by design

    static LinExpr variable(int index, double coeff = 1.0) {
        LinExpr e;
        if (coeff != 0.0) e.coef_[index] = coeff;
        return e;
    }

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(double a);

    double constant() const { return const_; }
    const std::map<int, double>& coeffs() const { return coef_; }
    double eval(const VectorXd& x) const;

private:
    std::map<int, double> coef_;
    double const_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double a, LinExpr e);
LinExpr operator-(LinExpr e);

/// Affine complex-Hermitian-matrix expression: constant + sum_p x_p C_p with
/// every coefficient matrix Hermitian.
class HermExpr {
public:
    explicit HermExpr(int dim);

    int dim() const { return dim_; }
    void add_term(int var_index, const MatrixXcd& coeff);
    void add_constant(const MatrixXcd& c);
    HermExpr& operator+=(const HermExpr& o);
    HermExpr& operator*=(double a);

    /// T^H M(x) T for a constant matrix T (dim x d).
    HermExpr congruence(const MatrixXcd& t) const;

    MatrixXcd eval(const VectorXd& x) const;
    const std::map<int, MatrixXcd>& terms() const { return terms_; }
    const MatrixXcd& constant_term() const { return const_; }

private:
    int dim_;
    std::map<int, MatrixXcd> terms_;
    MatrixXcd const_;
};

HermExpr operator+(HermExpr a, const HermExpr& b);
HermExpr operator-(HermExpr a, const HermExpr& b);
HermExpr operator*(double a, HermExpr e);

/// Handle to a Hermitian matrix variable (dim x dim, stored as dim^2 reals:
/// diagonal first, then (re, im) pairs for i < j in column-major order).
struct HermVar {
    int offset = 0;
    int dim = 0;
    int param_count() const { return dim * dim; }
};

struct Residuals {
    double primal_eq = 0.0;  // relative equality violation
    double cone = 0.0;       // relative cone membership violation of h - Gx
    double dual = 0.0;       // relative dual feasibility violation
    double gap = 0.0;        // relative primal-dual objective gap
    double worst() const;
};

struct SolverOutcome {
    SolveStatus status = SolveStatus::kNumericalFailure;
    double objective = 0.0;  // in the program's declared sense; valid iff optimal
    VectorXd x;              // primal variable values; valid iff optimal
    std::map<std::string, VectorXd> variable_values;
    Residuals residuals;
    int iterations = 0;
};

struct SolveOptions {
    IpmOptions ipm;
    bool equilibrate = true;
    /// An optimal IPM result whose independent recheck exceeds this relative
    /// violation is demoted to numerical_failure.
    double recheck_tol = 1e-6;
};

/**
 * Incrementally built conic program over scalar/vector/Hermitian variables
 * with linear, rotated second-order cone, and PSD constraints. Hermitian
 * PSD blocks are lowered to real svec blocks through the 2n x 2n symmetric
 * embedding at emission time.
 */
class ConicProgram {
public:
    int add_scalar(const std::string& name);
    int add_vector(const std::string& name, int dim);  // returns first index
    /// Declares a Hermitian matrix variable constrained to be PSD.
    HermVar add_hermitian_psd(const std::string& name, int dim);

    int num_vars() const { return n_; }

    // Expression helpers over Hermitian variables.
    LinExpr quad_form(const HermVar& v, const VectorXcd& h) const;  // h^H M h
    LinExpr trace(const HermVar& v) const;
    /// tr(T^H M T) for constant T.
    LinExpr congruence_trace(const HermVar& v, const MatrixXcd& t) const;
    HermExpr expr_of(const HermVar& v) const;
    MatrixXcd hermitian_value(const HermVar& v, const VectorXd& x) const;

    void add_eq(const LinExpr& e, double rhs);
    void add_ge(const LinExpr& e, double rhs);
    void add_le(const LinExpr& e, double rhs);
    /// u v >= |w|^2 with u, v >= 0, encoded as ||(2w, u-v)|| <= u+v.
    void add_rotated_soc(const LinExpr& u, const LinExpr& v,
                         const std::vector<LinExpr>& w);
    /// Real symmetric affine block (entries[i][j] must equal entries[j][i]).
    void add_psd_block(const std::vector<std::vector<LinExpr>>& entries);
    /// Complex Hermitian affine block, lowered via the real embedding.
    void add_psd_block(const HermExpr& m);

    void set_maximize(const LinExpr& e);
    void set_minimize(const LinExpr& e);

    /// Standard-form (minimization) data; deterministic row ordering.
    StandardForm standard_form() const;

    /// Emits standard form, equilibrates, solves, and independently rechecks
    /// residuals against the raw data before accepting an optimal status.
    SolverOutcome solve(const SolveOptions& opts = {}) const;

    /// Writes the standard-form data as the documented text format.
    void dump(std::ostream& os) const;

private:
    struct NamedBlock {
        std::string name;
        int offset;
        int size;
        int herm_dim;  // 0 for plain scalar/vector blocks
    };

    int n_ = 0;
    std::vector<NamedBlock> blocks_;
    std::vector<std::pair<LinExpr, double>> eqs_;    // expr == rhs
    std::vector<std::pair<LinExpr, double>> ges_;    // expr >= rhs
    struct RotatedSoc {
        LinExpr u, v;
        std::vector<LinExpr> w;
    };
    std::vector<RotatedSoc> rsocs_;
    struct PsdBlock {
        int side;
        std::vector<LinExpr> entries;  // row-major side x side, symmetric
    };
    std::vector<PsdBlock> psds_;
    LinExpr objective_;
    bool maximize_ = false;
};

/// Text serialization of standard-form data (round-trip exact).
void dump_standard_form(std::ostream& os, const StandardForm& sf);
StandardForm parse_standard_form(std::istream& is);

/// Relative residuals of a claimed-optimal primal/dual pair on raw data.
Residuals check_residuals(const StandardForm& sf, const VectorXd& x,
                          const VectorXd& y, const VectorXd& z);

/// Solve raw standard-form data (minimization) with equilibration and the
/// same independent recheck used by ConicProgram::solve.
struct RawOutcome {
    SolveStatus status = SolveStatus::kNumericalFailure;
    double objective = 0.0;
    VectorXd x, y, z, s;
    Residuals residuals;
    int iterations = 0;
};
RawOutcome solve_standard_form(const StandardForm& sf, const SolveOptions& opts = {});

}  // namespace secbeam::conic
