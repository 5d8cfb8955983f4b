#include "disac/conic_program.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace disac {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Mat embed_hermitian(const CMat& h) {
    if (h.rows() != h.cols()) throw DisacError("embed_hermitian: matrix not square");
    double scale = std::max(1.0, h.norm());
    if ((h - h.adjoint()).norm() > 1e-10 * scale)
        throw DisacError("embed_hermitian: matrix is not Hermitian");
    const int n = static_cast<int>(h.rows());
    Mat out(2 * n, 2 * n);
    Mat re = h.real(), im = h.imag();
    out.topLeftCorner(n, n) = re;
    out.bottomRightCorner(n, n) = re;
    out.topRightCorner(n, n) = -im;
    out.bottomLeftCorner(n, n) = im;
    return out;
}

CMat extract_hermitian(const Mat& x) {
    if (x.rows() != x.cols() || x.rows() % 2 != 0)
        throw DisacError("extract_hermitian: bad dimensions");
    const int n = static_cast<int>(x.rows()) / 2;
    Mat re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    Mat im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    CMat h = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    return hermitize(h);
}

Vec embed_vector(const CVec& v) {
    Vec out(2 * v.size());
    out.head(v.size()) = v.real();
    out.tail(v.size()) = v.imag();
    return out;
}

int svec_size(int dim) { return dim * (dim + 1) / 2; }

int svec_index(int dim, int row, int col) {
    if (row < col) std::swap(row, col);
    // column-major lower triangle
    return col * dim - col * (col - 1) / 2 + (row - col);
}

Vec svec(const Mat& x) {
    const int d = static_cast<int>(x.rows());
    Vec v(svec_size(d));
    int idx = 0;
    for (int c = 0; c < d; ++c)
        for (int r = c; r < d; ++r) v(idx++) = (r == c) ? x(r, c) : kSqrt2 * x(r, c);
    return v;
}

Mat smat(const Vec& v, int dim) {
    Mat x(dim, dim);
    int idx = 0;
    for (int c = 0; c < dim; ++c)
        for (int r = c; r < dim; ++r) {
            double val = (r == c) ? v(idx) : v(idx) / kSqrt2;
            x(r, c) = val;
            x(c, r) = val;
            ++idx;
        }
    return x;
}

int ConicProgram::add_psd_block(const std::string& name, int dim) {
    if (dim < 1) throw DisacError("add_psd_block: dimension must be positive");
    if (names_.count(name)) throw DisacError("duplicate variable name " + name);
    vars_.push_back({VarKind::PsdBlock, dim, name});
    names_[name] = static_cast<int>(vars_.size()) - 1;
    return names_[name];
}

int ConicProgram::add_scalar(const std::string& name, bool nonnegative) {
    if (names_.count(name)) throw DisacError("duplicate variable name " + name);
    vars_.push_back({nonnegative ? VarKind::NonnegScalar : VarKind::FreeScalar, 1, name});
    names_[name] = static_cast<int>(vars_.size()) - 1;
    return names_[name];
}

int ConicProgram::var_index(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) throw DisacError("unknown variable " + name);
    return it->second;
}

void ConicProgram::add_soc(std::vector<LinExpr> components) {
    if (components.size() < 2) throw DisacError("add_soc: need head and at least one component");
    socs_.push_back(std::move(components));
}

void ConicProgram::add_complex_trace(LinExpr& expr, int var, const CMat& c, double scale) const {
    // Re tr(C W) = 1/2 tr(embed(C) X) for X = embed(W); the symmetrized
    // embed(C) gives the coefficients on the symmetric variable entries.
    const Variable& v = vars_.at(var);
    if (v.kind != VarKind::PsdBlock || v.dim != 2 * c.rows())
        throw DisacError("add_complex_trace: variable does not encode this complex dimension");
    const int n = static_cast<int>(c.rows());
    Mat e(2 * n, 2 * n);
    Mat re = c.real(), im = c.imag();
    e.topLeftCorner(n, n) = re;
    e.bottomRightCorner(n, n) = re;
    e.topRightCorner(n, n) = -im;
    e.bottomLeftCorner(n, n) = im;
    Mat sym = 0.5 * (e + e.transpose());
    for (int i = 0; i < 2 * n; ++i) {
        if (sym(i, i) != 0.0) expr.add(var, i, i, 0.5 * scale * sym(i, i));
        for (int j = 0; j < i; ++j)
            if (sym(i, j) != 0.0) expr.add(var, i, j, scale * sym(i, j));
    }
}

void ConicProgram::add_complex_trace_imag(LinExpr& expr, int var, const CMat& c,
                                          double scale) const {
    add_complex_trace(expr, var, cplx(0.0, -1.0) * c, scale);
}

void ConicProgram::add_embedding_structure(int var) {
    const Variable& v = vars_.at(var);
    if (v.kind != VarKind::PsdBlock || v.dim % 2 != 0)
        throw DisacError("add_embedding_structure: not an even PSD block");
    const int n = v.dim / 2;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            // equal real-part copies
            LinExpr eq;
            eq.add(var, i, j, 1.0);
            eq.add(var, n + i, n + j, -1.0);
            add_equality(std::move(eq));
        }
        // antisymmetric imaginary block, zero on its diagonal
        LinExpr diag;
        diag.add(var, n + i, i, 1.0);
        add_equality(std::move(diag));
        for (int j = i + 1; j < n; ++j) {
            LinExpr eq;
            eq.add(var, n + i, j, 1.0);
            eq.add(var, n + j, i, 1.0);
            add_equality(std::move(eq));
        }
    }
}

ConicProgram::Compiled ConicProgram::compile() const {
    Compiled out;
    out.var_offset.resize(vars_.size());
    int n = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        out.var_offset[i] = n;
        n += vars_[i].kind == VarKind::PsdBlock ? svec_size(vars_[i].dim) : 1;
    }

    auto coords = [&](const LinExpr& e) {
        // accumulate svec coordinates of one expression
        std::map<int, double> row;
        for (const auto& t : e.terms) {
            const Variable& v = vars_.at(t.var);
            int idx;
            double coeff = t.coeff;
            if (v.kind == VarKind::PsdBlock) {
                if (t.row >= v.dim || t.col >= v.dim || t.row < 0 || t.col < 0)
                    throw DisacError("term index out of range for " + v.name);
                idx = out.var_offset[t.var] + svec_index(v.dim, t.row, t.col);
                if (t.row != t.col) coeff /= kSqrt2;
            } else {
                if (t.row != 0 || t.col != 0)
                    throw DisacError("scalar variable " + v.name + " indexed as matrix");
                idx = out.var_offset[t.var];
            }
            row[idx] += coeff;
        }
        return row;
    };

    // objective: maximize obj  ->  minimize c'x with c = -coeffs
    out.c = Vec::Zero(n);
    out.objective_constant = objective_.constant;
    for (const auto& [idx, coeff] : coords(objective_)) out.c(idx) = -coeff;

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> ta, tg;
    std::vector<double> bvals, hvals;

    for (const auto& e : equalities_) {
        int r = static_cast<int>(bvals.size());
        for (const auto& [idx, coeff] : coords(e)) ta.emplace_back(r, idx, coeff);
        bvals.push_back(-e.constant);
    }

    // cone rows: nonneg scalars and inequalities first, then SOC, then PSD
    int m = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].kind != VarKind::NonnegScalar) continue;
        tg.emplace_back(m, out.var_offset[i], -1.0);
        hvals.push_back(0.0);
        ++m;
    }
    for (const auto& e : inequalities_) {
        for (const auto& [idx, coeff] : coords(e)) tg.emplace_back(m, idx, -coeff);
        hvals.push_back(e.constant);
        ++m;
    }
    out.nonneg = m;

    for (const auto& soc : socs_) {
        out.soc_dims.push_back(static_cast<int>(soc.size()));
        for (const auto& e : soc) {
            for (const auto& [idx, coeff] : coords(e)) tg.emplace_back(m, idx, -coeff);
            hvals.push_back(e.constant);
            ++m;
        }
    }

    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].kind != VarKind::PsdBlock) continue;
        int d = vars_[i].dim;
        out.psd_dims.push_back(d);
        for (int j = 0; j < svec_size(d); ++j) {
            tg.emplace_back(m, out.var_offset[i] + j, -1.0);
            hvals.push_back(0.0);
            ++m;
        }
    }

    out.a.resize(static_cast<int>(bvals.size()), n);
    out.a.setFromTriplets(ta.begin(), ta.end());
    out.b = Eigen::Map<Vec>(bvals.data(), static_cast<int>(bvals.size()));
    out.g.resize(m, n);
    out.g.setFromTriplets(tg.begin(), tg.end());
    out.h = Eigen::Map<Vec>(hvals.data(), m);
    return out;
}

double ConicProgram::max_violation(const std::vector<Mat>& values) const {
    if (values.size() != vars_.size()) throw DisacError("max_violation: value count mismatch");
    auto eval = [&](const LinExpr& e) {
        double v = e.constant;
        for (const auto& t : e.terms) v += t.coeff * values[t.var](t.row, t.col);
        return v;
    };
    double worst = 0.0;
    for (const auto& e : equalities_) worst = std::max(worst, std::abs(eval(e)));
    for (const auto& e : inequalities_) worst = std::max(worst, -std::min(0.0, eval(e)));
    for (const auto& soc : socs_) {
        double head = eval(soc[0]);
        double norm2 = 0.0;
        for (std::size_t i = 1; i < soc.size(); ++i) {
            double v = eval(soc[i]);
            norm2 += v * v;
        }
        worst = std::max(worst, std::sqrt(norm2) - head);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].kind == VarKind::PsdBlock) {
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (values[i] + values[i].transpose()),
                                                  Eigen::EigenvaluesOnly);
            worst = std::max(worst, -es.eigenvalues().minCoeff());
        } else if (vars_[i].kind == VarKind::NonnegScalar) {
            worst = std::max(worst, -values[i](0, 0));
        }
    }
    return worst;
}

std::string ConicProgram::dump() const {
    std::ostringstream out;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "# disac conic program\n";
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        out << "var " << i << " ";
        switch (vars_[i].kind) {
            case VarKind::PsdBlock: out << "psd " << vars_[i].dim; break;
            case VarKind::NonnegScalar: out << "nonneg 1"; break;
            case VarKind::FreeScalar: out << "free 1"; break;
        }
        out << " " << vars_[i].name << "\n";
    }
    auto emit = [&](const std::string& section, int idx, int comp, const LinExpr& e) {
        out << section << "c " << idx;
        if (comp >= 0) out << " " << comp;
        out << " " << num(e.constant) << "\n";
        for (const auto& t : e.terms) {
            out << section << " " << idx;
            if (comp >= 0) out << " " << comp;
            out << " " << t.var << " " << t.row << " " << t.col << " " << num(t.coeff) << "\n";
        }
    };
    emit("obj", 0, -1, objective_);
    for (std::size_t i = 0; i < equalities_.size(); ++i)
        emit("eq", static_cast<int>(i), -1, equalities_[i]);
    for (std::size_t i = 0; i < inequalities_.size(); ++i)
        emit("ineq", static_cast<int>(i), -1, inequalities_[i]);
    for (std::size_t i = 0; i < socs_.size(); ++i)
        for (std::size_t j = 0; j < socs_[i].size(); ++j)
            emit("soc", static_cast<int>(i), static_cast<int>(j), socs_[i][j]);
    return out.str();
}

}  // namespace disac
