#include "secbeam/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "secbeam/hermitian.hpp"

namespace secbeam::conic {

namespace {

constexpr double kCoeffSymTol = 1e-12;

int pair_param_index(const HermVar& v, int i, int j) {
    // Pairs (i, j) with i < j, column-major: column j contributes j entries.
    const int t = j * (j - 1) / 2 + i;
    return v.offset + v.dim + 2 * t;
}

}  // namespace

// ---------------------------------------------------------------------------
// LinExpr

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    const_ += o.const_;
    for (const auto& [k, v] : o.coef_) {
        const double nv = (coef_.count(k) ? coef_[k] : 0.0) + v;
        if (nv == 0.0) {
            coef_.erase(k);
        } else {
            coef_[k] = nv;
        }
    }
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) { return *this += (-1.0 * o); }

LinExpr& LinExpr::operator*=(double a) {
    if (a == 0.0) {
        coef_.clear();
        const_ = 0.0;
        return *this;
    }
    const_ *= a;
    for (auto& [k, v] : coef_) v *= a;
    return *this;
}

double LinExpr::eval(const VectorXd& x) const {
    double r = const_;
    for (const auto& [k, v] : coef_) r += v * x[k];
    return r;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double a, LinExpr e) { return e *= a; }
LinExpr operator-(LinExpr e) { return e *= -1.0; }

// ---------------------------------------------------------------------------
// HermExpr

HermExpr::HermExpr(int dim) : dim_(dim), const_(MatrixXcd::Zero(dim, dim)) {
    if (dim <= 0) throw std::invalid_argument("HermExpr: dim must be positive");
}

void HermExpr::add_term(int var_index, const MatrixXcd& coeff) {
    if (coeff.rows() != dim_ || coeff.cols() != dim_) {
        throw std::invalid_argument("HermExpr::add_term: dimension mismatch");
    }
    const MatrixXcd sym = herm::symmetrize(coeff);
    if ((coeff - sym).norm() > kCoeffSymTol * std::max(1.0, coeff.norm())) {
        throw std::invalid_argument("HermExpr::add_term: coefficient not Hermitian");
    }
    auto it = terms_.find(var_index);
    if (it == terms_.end()) {
        terms_.emplace(var_index, sym);
    } else {
        it->second += sym;
    }
}

void HermExpr::add_constant(const MatrixXcd& c) {
    if (c.rows() != dim_ || c.cols() != dim_) {
        throw std::invalid_argument("HermExpr::add_constant: dimension mismatch");
    }
    const_ += herm::symmetrize(c);
}

HermExpr& HermExpr::operator+=(const HermExpr& o) {
    if (o.dim_ != dim_) throw std::invalid_argument("HermExpr: dimension mismatch");
    const_ += o.const_;
    for (const auto& [k, c] : o.terms_) {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
        }
    }
    return *this;
}

HermExpr& HermExpr::operator*=(double a) {
    const_ *= a;
    for (auto& [k, c] : terms_) c *= a;
    return *this;
}

HermExpr HermExpr::congruence(const MatrixXcd& t) const {
    if (t.rows() != dim_) throw std::invalid_argument("HermExpr::congruence: dimension mismatch");
    HermExpr out(static_cast<int>(t.cols()));
    out.const_ = t.adjoint() * const_ * t;
    for (const auto& [k, c] : terms_) {
        out.terms_.emplace(k, MatrixXcd(t.adjoint() * c * t));
    }
    return out;
}

MatrixXcd HermExpr::eval(const VectorXd& x) const {
    MatrixXcd m = const_;
    for (const auto& [k, c] : terms_) m += x[k] * c;
    return m;
}

HermExpr operator+(HermExpr a, const HermExpr& b) { return a += b; }

HermExpr operator-(HermExpr a, const HermExpr& b) {
    HermExpr nb = b;
    nb *= -1.0;
    return a += nb;
}

HermExpr operator*(double a, HermExpr e) { return e *= a; }

// ---------------------------------------------------------------------------
// ConicProgram: variables and expression helpers

int ConicProgram::add_scalar(const std::string& name) {
    const int idx = n_;
    blocks_.push_back({name, idx, 1, 0});
    n_ += 1;
    return idx;
}

int ConicProgram::add_vector(const std::string& name, int dim) {
    if (dim <= 0) throw std::invalid_argument("add_vector: dim must be positive");
    const int idx = n_;
    blocks_.push_back({name, idx, dim, 0});
    n_ += dim;
    return idx;
}

HermVar ConicProgram::add_hermitian_psd(const std::string& name, int dim) {
    if (dim <= 0) throw std::invalid_argument("add_hermitian_psd: dim must be positive");
    HermVar v;
    v.offset = n_;
    v.dim = dim;
    blocks_.push_back({name, v.offset, v.param_count(), dim});
    n_ += v.param_count();
    add_psd_block(expr_of(v));
    return v;
}

LinExpr ConicProgram::quad_form(const HermVar& v, const VectorXcd& h) const {
    if (h.size() != v.dim) throw std::invalid_argument("quad_form: dimension mismatch");
    LinExpr e;
    for (int i = 0; i < v.dim; ++i) {
        e += LinExpr::variable(v.offset + i, std::norm(h[i]));
    }
    for (int j = 1; j < v.dim; ++j) {
        for (int i = 0; i < j; ++i) {
            const std::complex<double> z = std::conj(h[i]) * h[j];
            const int p = pair_param_index(v, i, j);
            e += LinExpr::variable(p, 2.0 * z.real());
            e += LinExpr::variable(p + 1, -2.0 * z.imag());
        }
    }
    return e;
}

LinExpr ConicProgram::trace(const HermVar& v) const {
    LinExpr e;
    for (int i = 0; i < v.dim; ++i) e += LinExpr::variable(v.offset + i, 1.0);
    return e;
}

LinExpr ConicProgram::congruence_trace(const HermVar& v, const MatrixXcd& t) const {
    if (t.rows() != v.dim) throw std::invalid_argument("congruence_trace: dimension mismatch");
    // tr(T^H M T) = tr(M P) with P = T T^H.
    const MatrixXcd p = t * t.adjoint();
    LinExpr e;
    for (int i = 0; i < v.dim; ++i) {
        e += LinExpr::variable(v.offset + i, p(i, i).real());
    }
    for (int j = 1; j < v.dim; ++j) {
        for (int i = 0; i < j; ++i) {
            const int q = pair_param_index(v, i, j);
            e += LinExpr::variable(q, 2.0 * p(i, j).real());
            e += LinExpr::variable(q + 1, 2.0 * p(i, j).imag());
        }
    }
    return e;
}

HermExpr ConicProgram::expr_of(const HermVar& v) const {
    HermExpr e(v.dim);
    const std::complex<double> im(0.0, 1.0);
    for (int i = 0; i < v.dim; ++i) {
        MatrixXcd b = MatrixXcd::Zero(v.dim, v.dim);
        b(i, i) = 1.0;
        e.add_term(v.offset + i, b);
    }
    for (int j = 1; j < v.dim; ++j) {
        for (int i = 0; i < j; ++i) {
            const int p = pair_param_index(v, i, j);
            MatrixXcd br = MatrixXcd::Zero(v.dim, v.dim);
            br(i, j) = 1.0;
            br(j, i) = 1.0;
            e.add_term(p, br);
            MatrixXcd bi = MatrixXcd::Zero(v.dim, v.dim);
            bi(i, j) = im;
            bi(j, i) = -im;
            e.add_term(p + 1, bi);
        }
    }
    return e;
}

MatrixXcd ConicProgram::hermitian_value(const HermVar& v, const VectorXd& x) const {
    MatrixXcd m = MatrixXcd::Zero(v.dim, v.dim);
    for (int i = 0; i < v.dim; ++i) m(i, i) = x[v.offset + i];
    for (int j = 1; j < v.dim; ++j) {
        for (int i = 0; i < j; ++i) {
            const int p = pair_param_index(v, i, j);
            const std::complex<double> z(x[p], x[p + 1]);
            m(i, j) = z;
            m(j, i) = std::conj(z);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// ConicProgram: constraints and objective

void ConicProgram::add_eq(const LinExpr& e, double rhs) { eqs_.emplace_back(e, rhs); }
void ConicProgram::add_ge(const LinExpr& e, double rhs) { ges_.emplace_back(e, rhs); }
void ConicProgram::add_le(const LinExpr& e, double rhs) {
    ges_.emplace_back(-1.0 * e, -rhs);
}

void ConicProgram::add_rotated_soc(const LinExpr& u, const LinExpr& v,
                                   const std::vector<LinExpr>& w) {
    if (w.empty()) throw std::invalid_argument("add_rotated_soc: empty cross term");
    rsocs_.push_back({u, v, w});
}

void ConicProgram::add_psd_block(const std::vector<std::vector<LinExpr>>& entries) {
    const int side = static_cast<int>(entries.size());
    if (side <= 0) throw std::invalid_argument("add_psd_block: empty block");
    PsdBlock b;
    b.side = side;
    b.entries.resize(static_cast<size_t>(side) * side);
    for (int i = 0; i < side; ++i) {
        if (static_cast<int>(entries[i].size()) != side) {
            throw std::invalid_argument("add_psd_block: ragged block");
        }
        for (int j = 0; j < side; ++j) {
            // Symmetrize so minor asymmetry in caller-built grids cancels.
            b.entries[static_cast<size_t>(i) * side + j] =
                0.5 * (entries[i][j] + entries[j][i]);
        }
    }
    psds_.push_back(std::move(b));
}

void ConicProgram::add_psd_block(const HermExpr& m) {
    const int d = m.dim();
    const int side = 2 * d;
    PsdBlock b;
    b.side = side;
    b.entries.assign(static_cast<size_t>(side) * side, LinExpr());
    auto scatter = [&](const MatrixXcd& c, int var_index, bool is_const) {
        // Real embedding [[Re, -Im], [Im, Re]].
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const double re = c(i, j).real();
                const double im = c(i, j).imag();
                const int rows[4] = {i, i, i + d, i + d};
                const int cols[4] = {j, j + d, j, j + d};
                const double vals[4] = {re, -im, im, re};
                for (int k = 0; k < 4; ++k) {
                    if (vals[k] == 0.0) continue;
                    LinExpr& e = b.entries[static_cast<size_t>(rows[k]) * side + cols[k]];
                    if (is_const) {
                        e += LinExpr(vals[k]);
                    } else {
                        e += LinExpr::variable(var_index, vals[k]);
                    }
                }
            }
        }
    };
    scatter(m.constant_term(), -1, true);
    for (const auto& [k, c] : m.terms()) scatter(c, k, false);
    psds_.push_back(std::move(b));
}

void ConicProgram::set_maximize(const LinExpr& e) {
    objective_ = e;
    maximize_ = true;
}

void ConicProgram::set_minimize(const LinExpr& e) {
    objective_ = e;
    maximize_ = false;
}

// ---------------------------------------------------------------------------
// Emission

StandardForm ConicProgram::standard_form() const {
    StandardForm sf;
    const int n = n_;
    const int p = static_cast<int>(eqs_.size());

    sf.cones.l = static_cast<int>(ges_.size());
    int m = sf.cones.l;
    for (const auto& rs : rsocs_) {
        sf.cones.soc.push_back(static_cast<int>(rs.w.size()) + 2);
        m += static_cast<int>(rs.w.size()) + 2;
    }
    for (const auto& pb : psds_) {
        sf.cones.psd.push_back(pb.side);
        m += pb.side * (pb.side + 1) / 2;
    }

    sf.c = VectorXd::Zero(n);
    for (const auto& [k, v] : objective_.coeffs()) sf.c[k] = maximize_ ? -v : v;

    sf.A = MatrixXd::Zero(p, n);
    sf.b = VectorXd::Zero(p);
    for (int i = 0; i < p; ++i) {
        const auto& [e, rhs] = eqs_[static_cast<size_t>(i)];
        for (const auto& [k, v] : e.coeffs()) sf.A(i, k) = v;
        sf.b[i] = rhs - e.constant();
    }

    sf.G = MatrixXd::Zero(m, n);
    sf.h = VectorXd::Zero(m);
    int row = 0;
    // Slack equals the expression value: G row = -coeffs, h = constant.
    auto put = [&](const LinExpr& e, double scale) {
        for (const auto& [k, v] : e.coeffs()) sf.G(row, k) = -scale * v;
        sf.h[row] = scale * e.constant();
        ++row;
    };
    for (const auto& [e, rhs] : ges_) put(e - LinExpr(rhs), 1.0);
    for (const auto& rs : rsocs_) {
        put(rs.u + rs.v, 1.0);
        for (const auto& w : rs.w) put(w, 2.0);
        put(rs.u - rs.v, 1.0);
    }
    const double rt2 = std::sqrt(2.0);
    for (const auto& pb : psds_) {
        for (int j = 0; j < pb.side; ++j) {
            for (int i = j; i < pb.side; ++i) {
                put(pb.entries[static_cast<size_t>(i) * pb.side + j], i == j ? 1.0 : rt2);
            }
        }
    }
    sf.check_dims();
    return sf;
}

// ---------------------------------------------------------------------------
// Independent residual check

namespace {

struct RowBlock {
    enum Kind { kOrthant, kSoc, kPsd } kind;
    int start;
    int len;
    int side;  // psd only
};

std::vector<RowBlock> row_blocks(const ConeDims& cones) {
    std::vector<RowBlock> out;
    int at = 0;
    if (cones.l > 0) out.push_back({RowBlock::kOrthant, 0, cones.l, 0});
    at = cones.l;
    for (int q : cones.soc) {
        out.push_back({RowBlock::kSoc, at, q, 0});
        at += q;
    }
    for (int s : cones.psd) {
        const int len = s * (s + 1) / 2;
        out.push_back({RowBlock::kPsd, at, len, s});
        at += len;
    }
    return out;
}

// Worst relative cone violation of v over the blocks (0 when v is in the cone).
double cone_violation(const VectorXd& v, const ConeDims& cones) {
    double worst = 0.0;
    for (const auto& blk : row_blocks(cones)) {
        const auto seg = v.segment(blk.start, blk.len);
        const double scale = std::max(1.0, seg.cwiseAbs().maxCoeff());
        double margin = 0.0;
        switch (blk.kind) {
            case RowBlock::kOrthant:
                margin = seg.minCoeff();
                break;
            case RowBlock::kSoc:
                margin = seg[0] - seg.tail(blk.len - 1).norm();
                break;
            case RowBlock::kPsd: {
                const MatrixXd m = sym_smat(seg, blk.side);
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
                margin = es.eigenvalues().minCoeff();
                break;
            }
        }
        worst = std::max(worst, -margin / scale);
    }
    return worst;
}

}  // namespace

double Residuals::worst() const {
    return std::max(std::max(primal_eq, cone), std::max(dual, gap));
}

Residuals check_residuals(const StandardForm& sf, const VectorXd& x,
                          const VectorXd& y, const VectorXd& z) {
    Residuals r;
    const VectorXd s = sf.h - sf.G * x;
    if (sf.b.size() > 0) {
        r.primal_eq = (sf.A * x - sf.b).cwiseAbs().maxCoeff() /
                      std::max(1.0, sf.b.cwiseAbs().maxCoeff());
    }
    r.cone = std::max(cone_violation(s, sf.cones), cone_violation(z, sf.cones));
    VectorXd rd = sf.G.transpose() * z + sf.c;
    if (sf.b.size() > 0) rd += sf.A.transpose() * y;
    r.dual = rd.cwiseAbs().maxCoeff() / std::max(1.0, sf.c.cwiseAbs().maxCoeff());
    const double pobj = sf.c.dot(x);
    const double dobj = -(sf.b.size() > 0 ? sf.b.dot(y) : 0.0) - sf.h.dot(z);
    r.gap = std::abs(pobj - dobj) / std::max({1.0, std::abs(pobj), std::abs(dobj)});
    return r;
}

// ---------------------------------------------------------------------------
// Ruiz equilibration

namespace {

struct Equilibration {
    VectorXd d;   // column scales (n)
    VectorXd ea;  // equality row scales (p)
    VectorXd eg;  // cone row scales (m), uniform within soc/psd blocks
    double obj_scale = 1.0;
};

double inv_sqrt_scale(double norm) {
    if (!(norm > 0.0)) return 1.0;
    return std::clamp(1.0 / std::sqrt(norm), 1e-8, 1e8);
}

Equilibration equilibrate(StandardForm& sf) {
    const int n = static_cast<int>(sf.c.size());
    const int p = static_cast<int>(sf.b.size());
    const auto blocks = row_blocks(sf.cones);

    Equilibration eq;
    eq.d = VectorXd::Ones(n);
    eq.ea = VectorXd::Ones(p);
    eq.eg = VectorXd::Ones(sf.h.size());

    for (int iter = 0; iter < 8; ++iter) {
        for (int j = 0; j < n; ++j) {
            double nrm = sf.G.col(j).cwiseAbs().maxCoeff();
            if (p > 0) nrm = std::max(nrm, sf.A.col(j).cwiseAbs().maxCoeff());
            const double f = inv_sqrt_scale(nrm);
            sf.G.col(j) *= f;
            if (p > 0) sf.A.col(j) *= f;
            sf.c[j] *= f;
            eq.d[j] *= f;
        }
        for (int i = 0; i < p; ++i) {
            const double f = inv_sqrt_scale(sf.A.row(i).cwiseAbs().maxCoeff());
            sf.A.row(i) *= f;
            sf.b[i] *= f;
            eq.ea[i] *= f;
        }
        for (const auto& blk : blocks) {
            if (blk.kind == RowBlock::kOrthant) {
                for (int i = blk.start; i < blk.start + blk.len; ++i) {
                    const double f = inv_sqrt_scale(sf.G.row(i).cwiseAbs().maxCoeff());
                    sf.G.row(i) *= f;
                    sf.h[i] *= f;
                    eq.eg[i] *= f;
                }
            } else {
                // Uniform scale keeps the block inside the same cone.
                double nrm = 0.0;
                for (int i = blk.start; i < blk.start + blk.len; ++i) {
                    nrm = std::max(nrm, sf.G.row(i).cwiseAbs().maxCoeff());
                }
                const double f = inv_sqrt_scale(nrm);
                for (int i = blk.start; i < blk.start + blk.len; ++i) {
                    sf.G.row(i) *= f;
                    sf.h[i] *= f;
                    eq.eg[i] *= f;
                }
            }
        }
    }
    eq.obj_scale = std::max(1.0, sf.c.cwiseAbs().maxCoeff());
    sf.c /= eq.obj_scale;
    return eq;
}

}  // namespace

RawOutcome solve_standard_form(const StandardForm& sf, const SolveOptions& opts) {
    StandardForm work = sf;
    Equilibration eq;
    if (opts.equilibrate) {
        eq = equilibrate(work);
    } else {
        eq.d = VectorXd::Ones(sf.c.size());
        eq.ea = VectorXd::Ones(sf.b.size());
        eq.eg = VectorXd::Ones(sf.h.size());
    }

    const IpmResult res = ipm_solve(work, opts.ipm);

    RawOutcome out;
    out.status = res.status;
    out.iterations = res.iterations;
    if (res.status == SolveStatus::kOptimal) {
        out.x = eq.d.asDiagonal() * res.x;
        out.y = eq.obj_scale * (eq.ea.asDiagonal() * res.y);
        out.z = eq.obj_scale * (eq.eg.asDiagonal() * res.z);
        out.s = eq.eg.asDiagonal().inverse() * res.s;
        out.objective = sf.c.dot(out.x);
        out.residuals = check_residuals(sf, out.x, out.y, out.z);
        if (!(out.residuals.worst() <= opts.recheck_tol)) {
            out.status = SolveStatus::kNumericalFailure;
        }
    } else if (res.status == SolveStatus::kInfeasible ||
               res.status == SolveStatus::kUnbounded) {
        // Certificates live in the scaled geometry; map back for callers. Only
        // the vectors that form the certificate are populated.
        if (res.x.size() > 0) out.x = eq.d.asDiagonal() * res.x;
        if (res.y.size() > 0) out.y = eq.ea.asDiagonal() * res.y;
        if (res.z.size() > 0) out.z = eq.eg.asDiagonal() * res.z;
        if (res.s.size() > 0) out.s = eq.eg.asDiagonal().inverse() * res.s;
    }
    return out;
}

SolverOutcome ConicProgram::solve(const SolveOptions& opts) const {
    const StandardForm sf = standard_form();
    const RawOutcome raw = solve_standard_form(sf, opts);

    SolverOutcome out;
    out.status = raw.status;
    out.iterations = raw.iterations;
    out.residuals = raw.residuals;
    if (raw.status == SolveStatus::kOptimal) {
        out.x = raw.x;
        const double sense = maximize_ ? -1.0 : 1.0;
        out.objective = sense * raw.objective + objective_.constant();
        for (const auto& blk : blocks_) {
            out.variable_values[blk.name] = raw.x.segment(blk.offset, blk.size);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text round trip

namespace {

void dump_vector(std::ostream& os, const VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v[i];
    }
    os << '\n';
}

void dump_matrix(std::ostream& os, const MatrixXd& m) {
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j);
        }
        os << '\n';
    }
}

void expect_token(std::istream& is, const std::string& want) {
    std::string got;
    if (!(is >> got) || got != want) {
        throw std::runtime_error("parse_standard_form: expected '" + want + "', got '" +
                                 got + "'");
    }
}

}  // namespace

void dump_standard_form(std::ostream& os, const StandardForm& sf) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);
    os << "secbeam-conic-standard-form v1\n";
    os << "dims " << sf.c.size() << ' ' << sf.b.size() << ' ' << sf.h.size() << '\n';
    os << "cone l " << sf.cones.l << '\n';
    os << "cone q " << sf.cones.soc.size();
    for (int q : sf.cones.soc) os << ' ' << q;
    os << '\n';
    os << "cone s " << sf.cones.psd.size();
    for (int s : sf.cones.psd) os << ' ' << s;
    os << '\n';
    os << "c\n";
    dump_vector(os, sf.c);
    os << "A\n";
    dump_matrix(os, sf.A);
    os << "b\n";
    dump_vector(os, sf.b);
    os << "G\n";
    dump_matrix(os, sf.G);
    os << "h\n";
    dump_vector(os, sf.h);
    os << "end\n";
    os.flags(flags);
    os.precision(prec);
}

StandardForm parse_standard_form(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version) || magic != "secbeam-conic-standard-form" ||
        version != "v1") {
        throw std::runtime_error("parse_standard_form: bad header");
    }
    StandardForm sf;
    long n = 0, p = 0, m = 0;
    expect_token(is, "dims");
    if (!(is >> n >> p >> m)) throw std::runtime_error("parse_standard_form: bad dims");
    expect_token(is, "cone");
    expect_token(is, "l");
    if (!(is >> sf.cones.l)) throw std::runtime_error("parse_standard_form: bad cone l");
    expect_token(is, "cone");
    expect_token(is, "q");
    long nq = 0;
    if (!(is >> nq)) throw std::runtime_error("parse_standard_form: bad cone q");
    sf.cones.soc.resize(nq);
    for (auto& q : sf.cones.soc) {
        if (!(is >> q)) throw std::runtime_error("parse_standard_form: bad cone q dim");
    }
    expect_token(is, "cone");
    expect_token(is, "s");
    long ns = 0;
    if (!(is >> ns)) throw std::runtime_error("parse_standard_form: bad cone s");
    sf.cones.psd.resize(ns);
    for (auto& s : sf.cones.psd) {
        if (!(is >> s)) throw std::runtime_error("parse_standard_form: bad cone s dim");
    }
    auto read_vector = [&](const std::string& tag, long len) {
        expect_token(is, tag);
        VectorXd v(len);
        for (long i = 0; i < len; ++i) {
            if (!(is >> v[i])) throw std::runtime_error("parse_standard_form: bad " + tag);
        }
        return v;
    };
    auto read_matrix = [&](const std::string& tag, long rows, long cols) {
        expect_token(is, tag);
        MatrixXd mat(rows, cols);
        for (long i = 0; i < rows; ++i) {
            for (long j = 0; j < cols; ++j) {
                if (!(is >> mat(i, j))) {
                    throw std::runtime_error("parse_standard_form: bad " + tag);
                }
            }
        }
        return mat;
    };
    sf.c = read_vector("c", n);
    sf.A = read_matrix("A", p, n);
    sf.b = read_vector("b", p);
    sf.G = read_matrix("G", m, n);
    sf.h = read_vector("h", m);
    expect_token(is, "end");
    sf.check_dims();
    return sf;
}

void ConicProgram::dump(std::ostream& os) const { dump_standard_form(os, standard_form()); }

}  // namespace secbeam::conic
