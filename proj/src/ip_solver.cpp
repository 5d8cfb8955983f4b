#include "disac/ip_solver.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

// Nesterov-Todd scaled primal-dual path following with a Mehrotra
// predictor-corrector step, in the cone-LP form
//     min c'x   s.t.  A x = b,  G x + s = h,  s in K,
// K a product of the nonnegative orthant, second-order cones and PSD cones
// (svec coordinates). The KKT systems are reduced to the (x, y) saddle system
// [G'(W'W)^{-1}G, A'; A, 0] and solved densely with one step of iterative
// refinement.

namespace disac {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::NumericalTrouble: return "NumericalTrouble";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConeLayout {
    int nonneg = 0;
    std::vector<int> soc;
    std::vector<int> psd;  // matrix dimensions
    int rows = 0;          // total cone rows (svec coords for psd)
    int degree = 0;
    std::vector<int> soc_start;
    std::vector<int> psd_start;

    static ConeLayout make(int nonneg, const std::vector<int>& soc, const std::vector<int>& psd) {
        ConeLayout l;
        l.nonneg = nonneg;
        l.soc = soc;
        l.psd = psd;
        int at = nonneg;
        l.degree = nonneg;
        for (int q : soc) {
            l.soc_start.push_back(at);
            at += q;
            l.degree += 1;
        }
        for (int d : psd) {
            l.psd_start.push_back(at);
            at += svec_size(d);
            l.degree += d;
        }
        l.rows = at;
        return l;
    }

    Vec identity() const {
        Vec e = Vec::Zero(rows);
        e.head(nonneg).setOnes();
        for (std::size_t i = 0; i < soc.size(); ++i) e(soc_start[i]) = 1.0;
        for (std::size_t i = 0; i < psd.size(); ++i) {
            int d = psd[i];
            int at = psd_start[i];
            for (int c = 0; c < d; ++c) {
                e(at) = 1.0;
                at += d - c;
            }
        }
        return e;
    }

    /// Smallest "eigenvalue" of a point with respect to the cone.
    double min_eig(const Vec& v) const {
        double m = kInf;
        for (int i = 0; i < nonneg; ++i) m = std::min(m, v(i));
        for (std::size_t i = 0; i < soc.size(); ++i) {
            auto blk = v.segment(soc_start[i], soc[i]);
            m = std::min(m, blk(0) - blk.tail(soc[i] - 1).norm());
        }
        for (std::size_t i = 0; i < psd.size(); ++i) {
            Mat x = smat(v.segment(psd_start[i], svec_size(psd[i])), psd[i]);
            Eigen::SelfAdjointEigenSolver<Mat> es(x, Eigen::EigenvaluesOnly);
            m = std::min(m, es.eigenvalues().minCoeff());
        }
        return m;
    }

    /// Largest t >= 0 with v + t dv in the cone, for v strictly interior.
    double max_step(const Vec& v, const Vec& dv) const {
        double t = kInf;
        for (int i = 0; i < nonneg; ++i)
            if (dv(i) < 0.0) t = std::min(t, -v(i) / dv(i));
        for (std::size_t i = 0; i < soc.size(); ++i) {
            auto x = v.segment(soc_start[i], soc[i]);
            auto d = dv.segment(soc_start[i], soc[i]);
            int q = soc[i];
            double a = d(0) * d(0) - d.tail(q - 1).squaredNorm();
            double b = 2.0 * (x(0) * d(0) - x.tail(q - 1).dot(d.tail(q - 1)));
            double c = x(0) * x(0) - x.tail(q - 1).squaredNorm();
            double root = kInf;
            if (std::abs(a) < 1e-300) {
                if (b < 0.0) root = -c / b;
            } else {
                double disc = b * b - 4.0 * a * c;
                if (disc >= 0.0) {
                    double sq = std::sqrt(disc);
                    double r1 = (-b - sq) / (2.0 * a);
                    double r2 = (-b + sq) / (2.0 * a);
                    if (r1 > r2) std::swap(r1, r2);
                    if (r1 > 0.0) root = r1;
                    else if (r2 > 0.0) root = r2;
                }
            }
            t = std::min(t, root);
            if (d(0) < 0.0) t = std::min(t, -x(0) / d(0));
        }
        for (std::size_t i = 0; i < psd.size(); ++i) {
            int d = psd[i];
            Mat x = smat(v.segment(psd_start[i], svec_size(d)), d);
            Mat dx = smat(dv.segment(psd_start[i], svec_size(d)), d);
            Eigen::LLT<Mat> llt(x);
            if (llt.info() != Eigen::Success) {
                llt.compute(x + 1e-14 * std::max(1.0, x.trace()) * Mat::Identity(d, d));
                if (llt.info() != Eigen::Success) return 0.0;
            }
            Mat l = llt.matrixL();
            Mat m = l.triangularView<Eigen::Lower>().solve(-dx);
            m = l.triangularView<Eigen::Lower>().solve(m.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                                  Eigen::EigenvaluesOnly);
            double lmax = es.eigenvalues().maxCoeff();
            if (lmax > 0.0) t = std::min(t, 1.0 / lmax);
        }
        return t;
    }
};

/// Nesterov-Todd scaling for (s, z): lambda = W z = W^{-T} s.
struct Scaling {
    Vec lin_w;  // nonneg block: w_i = sqrt(s_i / z_i)
    struct Soc {
        double beta = 1.0;
        Vec wbar;  // unit hyperbolic vector
    };
    std::vector<Soc> soc;
    struct Psd {
        Mat r;     // W(u) = R' U R
        Mat rinv;  // R^{-1}
        Vec sigma; // scaled point diagonal
    };
    std::vector<Psd> psd;
    Vec lambda;
    bool ok = true;
};

Vec jmul(const Vec& v) {  // SOC reflection J v = (v0, -v1)
    Vec out = -v;
    out(0) = v(0);
    return out;
}

Scaling compute_scaling(const ConeLayout& cone, const Vec& s, const Vec& z) {
    Scaling w;
    w.lambda = Vec::Zero(cone.rows);
    w.lin_w = Vec::Zero(cone.nonneg);
    for (int i = 0; i < cone.nonneg; ++i) {
        if (s(i) <= 0.0 || z(i) <= 0.0) {
            w.ok = false;
            return w;
        }
        w.lin_w(i) = std::sqrt(s(i) / z(i));
        w.lambda(i) = std::sqrt(s(i) * z(i));
    }
    for (std::size_t i = 0; i < cone.soc.size(); ++i) {
        int q = cone.soc[i];
        Vec sb = s.segment(cone.soc_start[i], q);
        Vec zb = z.segment(cone.soc_start[i], q);
        double sres = sb(0) * sb(0) - sb.tail(q - 1).squaredNorm();
        double zres = zb(0) * zb(0) - zb.tail(q - 1).squaredNorm();
        if (sres <= 0.0 || zres <= 0.0 || sb(0) <= 0.0 || zb(0) <= 0.0) {
            w.ok = false;
            return w;
        }
        double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
        Vec sbar = sb / snorm, zbar = zb / znorm;
        double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
        Scaling::Soc sc;
        sc.beta = std::sqrt(std::sqrt(sres / zres));
        sc.wbar = (sbar + jmul(zbar)) / (2.0 * gamma);
        w.soc.push_back(sc);
        // lambda = W z
        const Vec& wb = w.soc.back().wbar;
        Vec lam = sc.beta * (2.0 * wb * wb.dot(zb) - jmul(zb));
        w.lambda.segment(cone.soc_start[i], q) = lam;
    }
    for (std::size_t i = 0; i < cone.psd.size(); ++i) {
        int d = cone.psd[i];
        Mat sm = smat(s.segment(cone.psd_start[i], svec_size(d)), d);
        Mat zm = smat(z.segment(cone.psd_start[i], svec_size(d)), d);
        Eigen::LLT<Mat> ls(sm), lz(zm);
        if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
            w.ok = false;
            return w;
        }
        Mat lsm = ls.matrixL();
        Mat lzm = lz.matrixL();
        Eigen::JacobiSVD<Mat> svd(lzm.transpose() * lsm,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
        Vec sig = svd.singularValues();
        if (sig.minCoeff() <= 0.0) {
            w.ok = false;
            return w;
        }
        Scaling::Psd p;
        Vec isq = sig.array().sqrt().inverse().matrix();
        p.r = lsm * svd.matrixV() * isq.asDiagonal();
        p.rinv = isq.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
        p.sigma = sig;
        w.psd.push_back(p);
        Vec lam = Vec::Zero(svec_size(d));
        int at = 0;
        for (int c = 0; c < d; ++c) {
            lam(at) = sig(c);
            at += d - c;
        }
        w.lambda.segment(cone.psd_start[i], svec_size(d)) = lam;
    }
    return w;
}

enum class Op { W, Wt, Winv, WinvT };

/// Apply the NT scaling (or its transpose/inverse) blockwise.
Vec apply_scaling(const ConeLayout& cone, const Scaling& w, const Vec& u, Op op) {
    Vec out(cone.rows);
    for (int i = 0; i < cone.nonneg; ++i) {
        double wi = w.lin_w(i);
        out(i) = (op == Op::W || op == Op::Wt) ? wi * u(i) : u(i) / wi;
    }
    for (std::size_t i = 0; i < cone.soc.size(); ++i) {
        int q = cone.soc[i];
        Vec ub = u.segment(cone.soc_start[i], q);
        const auto& sc = w.soc[i];
        Vec r;
        if (op == Op::W || op == Op::Wt) {
            r = sc.beta * (2.0 * sc.wbar * sc.wbar.dot(ub) - jmul(ub));
        } else {
            Vec jw = jmul(sc.wbar);
            r = (2.0 * jw * jw.dot(ub) - jmul(ub)) / sc.beta;
        }
        out.segment(cone.soc_start[i], q) = r;
    }
    for (std::size_t i = 0; i < cone.psd.size(); ++i) {
        int d = cone.psd[i];
        Mat um = smat(u.segment(cone.psd_start[i], svec_size(d)), d);
        const auto& p = w.psd[i];
        Mat r;
        switch (op) {
            case Op::W: r = p.r.transpose() * um * p.r; break;
            case Op::Wt: r = p.r * um * p.r.transpose(); break;
            case Op::Winv: r = p.rinv.transpose() * um * p.rinv; break;
            case Op::WinvT: r = p.rinv * um * p.rinv.transpose(); break;
        }
        out.segment(cone.psd_start[i], svec_size(d)) = svec(0.5 * (r + r.transpose()));
    }
    return out;
}

/// (W'W)^{-1} u, blockwise.
Vec apply_wtw_inv(const ConeLayout& cone, const Scaling& w, const Vec& u) {
    Vec out(cone.rows);
    for (int i = 0; i < cone.nonneg; ++i) out(i) = u(i) / (w.lin_w(i) * w.lin_w(i));
    for (std::size_t i = 0; i < cone.soc.size(); ++i) {
        int q = cone.soc[i];
        Vec ub = u.segment(cone.soc_start[i], q);
        const auto& sc = w.soc[i];
        Vec jw = jmul(sc.wbar);
        Vec once = (2.0 * jw * jw.dot(ub) - jmul(ub)) / sc.beta;
        out.segment(cone.soc_start[i], q) = (2.0 * jw * jw.dot(once) - jmul(once)) / sc.beta;
    }
    for (std::size_t i = 0; i < cone.psd.size(); ++i) {
        int d = cone.psd[i];
        Mat um = smat(u.segment(cone.psd_start[i], svec_size(d)), d);
        const auto& p = w.psd[i];
        Mat q = p.rinv.transpose() * p.rinv;  // (R R')^{-1}
        Mat r = q * um * q;
        out.segment(cone.psd_start[i], svec_size(d)) = svec(0.5 * (r + r.transpose()));
    }
    return out;
}

/// Jordan product u o v in the scaled space.
Vec jordan(const ConeLayout& cone, const Vec& u, const Vec& v) {
    Vec out(cone.rows);
    for (int i = 0; i < cone.nonneg; ++i) out(i) = u(i) * v(i);
    for (std::size_t i = 0; i < cone.soc.size(); ++i) {
        int q = cone.soc[i];
        Vec ub = u.segment(cone.soc_start[i], q);
        Vec vb = v.segment(cone.soc_start[i], q);
        Vec r(q);
        r(0) = ub.dot(vb);
        r.tail(q - 1) = ub(0) * vb.tail(q - 1) + vb(0) * ub.tail(q - 1);
        out.segment(cone.soc_start[i], q) = r;
    }
    for (std::size_t i = 0; i < cone.psd.size(); ++i) {
        int d = cone.psd[i];
        Mat um = smat(u.segment(cone.psd_start[i], svec_size(d)), d);
        Mat vm = smat(v.segment(cone.psd_start[i], svec_size(d)), d);
        out.segment(cone.psd_start[i], svec_size(d)) = svec(0.5 * (um * vm + vm * um));
    }
    return out;
}

/// Solve lambda o u = d for u, using the structure of the scaled point.
Vec jordan_div(const ConeLayout& cone, const Scaling& w, const Vec& d) {
    Vec out(cone.rows);
    for (int i = 0; i < cone.nonneg; ++i) out(i) = d(i) / w.lambda(i);
    for (std::size_t i = 0; i < cone.soc.size(); ++i) {
        int q = cone.soc[i];
        Vec lb = w.lambda.segment(cone.soc_start[i], q);
        Vec db = d.segment(cone.soc_start[i], q);
        double det = lb(0) * lb(0) - lb.tail(q - 1).squaredNorm();
        double u0 = (lb(0) * db(0) - lb.tail(q - 1).dot(db.tail(q - 1))) / det;
        Vec u1 = (db.tail(q - 1) - u0 * lb.tail(q - 1)) / lb(0);
        out(cone.soc_start[i]) = u0;
        out.segment(cone.soc_start[i] + 1, q - 1) = u1;
    }
    for (std::size_t i = 0; i < cone.psd.size(); ++i) {
        int dd = cone.psd[i];
        Mat dm = smat(d.segment(cone.psd_start[i], svec_size(dd)), dd);
        const Vec& sig = w.psd[i].sigma;
        Mat um(dd, dd);
        for (int r = 0; r < dd; ++r)
            for (int c = 0; c < dd; ++c) um(r, c) = 2.0 * dm(r, c) / (sig(r) + sig(c));
        out.segment(cone.psd_start[i], svec_size(dd)) = svec(0.5 * (um + um.transpose()));
    }
    return out;
}

/// Dense factorization of the reduced KKT matrix [H A'; A -regI],
/// H = G'(W'W)^{-1}G + regI.
class KktSolver {
  public:
    KktSolver(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& g,
              const Eigen::SparseMatrix<double, Eigen::RowMajor>& g_rows, const ConeLayout& cone,
              double reg)
        : a_(a), g_(g), g_rows_(g_rows), cone_(cone), reg_(reg) {}

    void factor(const Scaling& w) {
        w_ = &w;
        const int n = static_cast<int>(g_.cols());
        const int p = static_cast<int>(a_.rows());
        Mat h = Mat::Zero(n, n);

        // nonneg rows: rank-one updates scaled by z/s = 1/w^2
        for (int i = 0; i < cone_.nonneg; ++i) {
            double scale = 1.0 / (w.lin_w(i) * w.lin_w(i));
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g_rows_, i); it;
                 ++it)
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator jt(g_rows_, i);
                     jt; ++jt)
                    h(it.col(), jt.col()) += scale * it.value() * jt.value();
        }
        // SOC blocks: H += (W^{-1} Gq)'(W^{-1} Gq)
        for (std::size_t i = 0; i < cone_.soc.size(); ++i) {
            int q = cone_.soc[i];
            int at = cone_.soc_start[i];
            std::vector<int> cols;
            Mat gq = Mat::Zero(q, n);
            for (int r = 0; r < q; ++r)
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g_rows_,
                                                                                    at + r);
                     it; ++it) {
                    gq(r, it.col()) = it.value();
                    cols.push_back(static_cast<int>(it.col()));
                }
            std::sort(cols.begin(), cols.end());
            cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
            const auto& sc = w.soc[i];
            Vec jw = jmul(sc.wbar);
            Mat gs(q, static_cast<int>(cols.size()));
            for (std::size_t cidx = 0; cidx < cols.size(); ++cidx) {
                Vec col = gq.col(cols[cidx]);
                gs.col(cidx) = (2.0 * jw * jw.dot(col) - jmul(col)) / sc.beta;
            }
            Mat hs = gs.transpose() * gs;
            for (std::size_t r = 0; r < cols.size(); ++r)
                for (std::size_t c = 0; c < cols.size(); ++c) h(cols[r], cols[c]) += hs(r, c);
        }
        // PSD membership rows are -I on the block's coordinates, so the
        // contribution is the matrix of u -> Q smat(u) Q with Q = (R R')^{-1}.
        for (std::size_t i = 0; i < cone_.psd.size(); ++i) {
            int d = cone_.psd[i];
            const auto& p = w.psd[i];
            Mat qm = p.rinv.transpose() * p.rinv;
            int base = column_of_psd(i);
            int idx = 0;
            const double s2 = std::sqrt(2.0);
            for (int c = 0; c < d; ++c) {
                for (int r = c; r < d; ++r) {
                    Mat outer;
                    if (r == c) outer = qm.col(r) * qm.row(r);
                    else outer = (qm.col(r) * qm.row(c) + qm.col(c) * qm.row(r)) / s2;
                    h.block(base, base + idx, svec_size(d), 1) +=
                        svec(0.5 * (outer + outer.transpose()));
                    ++idx;
                }
            }
        }

        const int dim = n + p;
        Mat m = Mat::Zero(dim, dim);
        m.topLeftCorner(n, n) = h + reg_ * Mat::Identity(n, n);
        if (p > 0) {
            m.topRightCorner(n, p) = Mat(a_.transpose());
            m.bottomLeftCorner(p, n) = Mat(a_);
            m.bottomRightCorner(p, p) = -reg_ * Mat::Identity(p, p);
        }
        lu_.compute(m);
    }

    /// Solve the 3x3 system [0 A' G'; A 0 0; G 0 -W'W] (dx,dy,dz) = (rx,ry,rz).
    void solve(const Vec& rx, const Vec& ry, const Vec& rz, Vec& dx, Vec& dy, Vec& dz,
               bool refine) const {
        solve_once(rx, ry, rz, dx, dy, dz);
        if (refine) {
            Vec ex = rx - (at_mul(dy) + gt_mul(dz));
            Vec ey = ry - g_a_mul(dx);
            Vec ez = rz - (g_ * dx - apply_wtw(dz));
            Vec cx, cy, cz;
            solve_once(ex, ey, ez, cx, cy, cz);
            dx += cx;
            dy += cy;
            dz += cz;
        }
    }

  private:
    int column_of_psd(std::size_t i) const {
        // psd membership rows are -identity: the first row of psd block i has
        // exactly one entry whose column is the block's first coordinate.
        Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g_rows_,
                                                                       cone_.psd_start[i]);
        return static_cast<int>(it.col());
    }

    Vec at_mul(const Vec& y) const {
        return a_.rows() > 0 ? Vec(a_.transpose() * y) : Vec::Zero(g_.cols());
    }
    Vec gt_mul(const Vec& z) const { return g_.transpose() * z; }
    Vec g_a_mul(const Vec& x) const { return a_.rows() > 0 ? Vec(a_ * x) : Vec(); }
    Vec apply_wtw(const Vec& u) const {
        Vec t = apply_scaling(cone_, *w_, u, Op::W);
        return apply_scaling(cone_, *w_, t, Op::Wt);
    }

    void solve_once(const Vec& rx, const Vec& ry, const Vec& rz, Vec& dx, Vec& dy,
                    Vec& dz) const {
        const int n = static_cast<int>(g_.cols());
        const int p = static_cast<int>(a_.rows());
        Vec winv_rz = apply_wtw_inv(cone_, *w_, rz);
        Vec rhs(n + p);
        rhs.head(n) = rx + gt_mul(winv_rz);
        if (p > 0) rhs.tail(p) = ry;
        Vec sol = lu_.solve(rhs);
        dx = sol.head(n);
        dy = p > 0 ? Vec(sol.tail(p)) : Vec();
        dz = apply_wtw_inv(cone_, *w_, Vec(g_ * dx - rz));
    }

    const Eigen::SparseMatrix<double>& a_;
    const Eigen::SparseMatrix<double>& g_;
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& g_rows_;
    const ConeLayout& cone_;
    double reg_;
    const Scaling* w_ = nullptr;
    Eigen::PartialPivLU<Mat> lu_;
};

bool has_nan(const Vec& v) { return !v.allFinite(); }

}  // namespace

ConeLpResult solve_conelp(const Vec& c, const Eigen::SparseMatrix<double>& a, const Vec& b,
                          const Eigen::SparseMatrix<double>& g, const Vec& h, int nonneg,
                          const std::vector<int>& soc_dims, const std::vector<int>& psd_dims,
                          const SolverSettings& settings) {
    ConeLpResult res;
    const int n = static_cast<int>(c.size());
    const int p = static_cast<int>(a.rows());
    const int m = static_cast<int>(g.rows());
    ConeLayout cone = ConeLayout::make(nonneg, soc_dims, psd_dims);
    if (cone.rows != m) {
        res.message = "cone layout does not match G";
        return res;
    }
    if (m == 0) {
        res.message = "program has no conic structure";
        return res;
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> g_rows(g);

    const double resx0 = std::max(1.0, c.norm());
    const double resy0 = std::max(1.0, b.norm());
    const double resz0 = std::max(1.0, h.norm());

    // Initial point from two KKT solves with identity scaling.
    Vec ones_s = Vec::Ones(m), ones_z = Vec::Ones(m);
    Vec e = cone.identity();
    // make SOC/PSD blocks of the "ones" start equal to the cone identity
    ones_s = e;
    ones_z = e;
    Scaling w0 = compute_scaling(cone, ones_s, ones_z);
    KktSolver kkt(a, g, g_rows, cone, settings.static_regularization);
    kkt.factor(w0);

    Vec x, y, z, s, tmpz;
    {
        Vec dx, dy, dz;
        kkt.solve(Vec::Zero(n), b, h, dx, dy, dz, settings.iterative_refinement);
        x = dx;
        s = -(g * x - h);  // slack consistent with G x + s = h
        double alpha = -cone.min_eig(s);
        if (alpha >= 0.0) s += (1.0 + alpha) * e;
        kkt.solve(-c, Vec::Zero(p), Vec::Zero(m), dx, dy, dz, settings.iterative_refinement);
        y = dy;
        z = dz;
        double beta = -cone.min_eig(z);
        if (beta >= 0.0) z += (1.0 + beta) * e;
    }
    if (has_nan(x) || has_nan(s) || has_nan(z) || (p > 0 && has_nan(y))) {
        res.message = "initialization produced non-finite values";
        return res;
    }

    auto finish = [&](SolveStatus st, int iters, const std::string& msg) {
        res.status = st;
        res.x = x;
        res.y = y;
        res.z = z;
        res.s = s;
        res.iterations = iters;
        res.message = msg;
        return res;
    };

    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        Vec rx = (p > 0 ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z + c;
        Vec ry = (p > 0 ? Vec(a * x - b) : Vec());
        Vec rz = g * x + s - h;
        double gap = s.dot(z);
        double pcost = c.dot(x);
        double dcost = -(p > 0 ? b.dot(y) : 0.0) - h.dot(z);
        double pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0);
        double dres = rx.norm() / resx0;
        double relgap = kInf;
        if (pcost < 0.0) relgap = gap / -pcost;
        else if (dcost > 0.0) relgap = gap / dcost;

        res.gap = gap;
        res.primal_residual = pres;
        res.dual_residual = dres;

        if (pres <= settings.feastol && dres <= settings.feastol &&
            (gap <= settings.abstol || relgap <= settings.reltol))
            return finish(SolveStatus::Optimal, iter, "converged");

        // Infeasibility certificates.
        double hz_by = -(h.dot(z) + (p > 0 ? b.dot(y) : 0.0));
        if (hz_by > 0.0) {
            double pinfres =
                ((p > 0 ? Vec(a.transpose() * y) : Vec::Zero(n)) + g.transpose() * z).norm() /
                resx0 / hz_by;
            if (pinfres <= settings.feastol)
                return finish(SolveStatus::Infeasible, iter, "primal infeasibility certificate");
        }
        if (-pcost > 0.0) {
            double dinfres = std::max(p > 0 ? (a * x).norm() / resy0 : 0.0,
                                      (g * x + s).norm() / resz0) /
                             -pcost;
            if (dinfres <= settings.feastol)
                return finish(SolveStatus::Unbounded, iter, "dual infeasibility certificate");
        }
        if (iter == settings.max_iterations)
            return finish(SolveStatus::NumericalTrouble, iter, "iteration limit reached");

        Scaling w = compute_scaling(cone, s, z);
        if (!w.ok) return finish(SolveStatus::NumericalTrouble, iter, "iterate left the cone");
        double mu = gap / cone.degree;
        kkt.factor(w);

        // Affine (predictor) direction.
        Vec dxa, dya, dza;
        kkt.solve(-rx, p > 0 ? Vec(-ry) : Vec(), -rz + s, dxa, dya, dza,
                  settings.iterative_refinement);
        Vec dsa = -rz - g * dxa;
        if (has_nan(dxa) || has_nan(dza) || has_nan(dsa))
            return finish(SolveStatus::NumericalTrouble, iter, "KKT solve failed");
        double alpha_aff = std::min({1.0, cone.max_step(s, dsa), cone.max_step(z, dza)});
        double sigma = std::pow(1.0 - alpha_aff, 3);

        // Combined (corrector) direction with Mehrotra second-order term.
        Vec ds_scaled = apply_scaling(cone, w, dsa, Op::WinvT);
        Vec dz_scaled = apply_scaling(cone, w, dza, Op::W);
        Vec d = sigma * mu * e - jordan(cone, w.lambda, w.lambda) -
                jordan(cone, ds_scaled, dz_scaled);
        Vec rhs3 = -(1.0 - sigma) * rz - apply_scaling(cone, w, jordan_div(cone, w, d), Op::Wt);
        Vec dx, dy, dz;
        kkt.solve(-(1.0 - sigma) * rx, p > 0 ? Vec(-(1.0 - sigma) * ry) : Vec(), rhs3, dx, dy, dz,
                  settings.iterative_refinement);
        Vec ds = -(1.0 - sigma) * rz - g * dx;
        if (has_nan(dx) || has_nan(dz) || has_nan(ds))
            return finish(SolveStatus::NumericalTrouble, iter, "KKT solve failed");

        double alpha = std::min({1.0 / settings.step_scale, cone.max_step(s, ds),
                                 cone.max_step(z, dz)}) *
                       settings.step_scale;
        alpha = std::min(alpha, 1.0);
        if (std::getenv("DISAC_IP_DEBUG"))
            std::fprintf(stderr,
                         "it %2d pcost %+.6e gap %.3e pres %.2e dres %.2e aff %.3f sig %.3f "
                         "alpha %.3e\n",
                         iter, pcost, gap, pres, dres, alpha_aff, sigma, alpha);
        if (!(alpha > 1e-13))
            return finish(SolveStatus::NumericalTrouble, iter, "step length collapsed");

        x += alpha * dx;
        if (p > 0) y += alpha * dy;
        s += alpha * ds;
        z += alpha * dz;
    }
    return res;  // unreachable
}

SolveReport solve(const ConicProgram& program, const SolverSettings& settings) {
    ConicProgram::Compiled cp = program.compile();
    ConeLpResult raw = solve_conelp(cp.c, cp.a, cp.b, cp.g, cp.h, cp.nonneg, cp.soc_dims,
                                    cp.psd_dims, settings);
    SolveReport report;
    report.status = raw.status;
    report.solver_iterations = raw.iterations;
    report.duality_gap = raw.gap;
    report.message = raw.message;

    const auto& vars = program.variables();
    report.variable_values.resize(vars.size());
    if (raw.x.size() == cp.c.size() && raw.x.allFinite()) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].kind == ConicProgram::VarKind::PsdBlock) {
                int d = vars[i].dim;
                report.variable_values[i] =
                    smat(raw.x.segment(cp.var_offset[i], svec_size(d)), d);
            } else {
                report.variable_values[i] = Mat::Constant(1, 1, raw.x(cp.var_offset[i]));
            }
        }
        report.objective_value = cp.objective_constant - cp.c.dot(raw.x);
        if (raw.status == SolveStatus::Optimal)
            report.max_constraint_violation = program.max_violation(report.variable_values);
    } else {
        for (std::size_t i = 0; i < vars.size(); ++i)
            report.variable_values[i] = Mat::Zero(vars[i].dim, vars[i].dim);
        report.objective_value = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

}  // namespace disac
