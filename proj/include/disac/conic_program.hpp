#ifndef DISAC_CONIC_PROGRAM_HPP
#define DISAC_CONIC_PROGRAM_HPP

#include <Eigen/Sparse>
#include <map>
#include <string>
#include <vector>

#include "disac/common.hpp"

namespace disac {

/// [[Re H, -Im H], [Im H, Re H]] embedding of a Hermitian matrix. PSD is
/// preserved, eigenvalues double their multiplicity, and
/// tr(embed(A) embed(B)) = 2 Re tr(A B). Inputs farther than 1e-10 from
/// Hermitian are rejected.
Mat embed_hermitian(const CMat& h);

/// Inverse of embed_hermitian, averaging the two redundant copies.
CMat extract_hermitian(const Mat& x);

/// Real-pair representation [Re v; Im v] of a complex vector.
Vec embed_vector(const CVec& v);

// Scaled lower-triangular vectorization: off-diagonal entries carry sqrt(2) so
// that svec(A) . svec(B) = tr(A B) for symmetric A, B.
int svec_size(int dim);
int svec_index(int dim, int row, int col);
Vec svec(const Mat& x);
Mat smat(const Vec& v, int dim);

/// Solver-agnostic conic program: a linear objective (maximized) over PSD
/// block, nonnegative scalar, and free scalar variables, constrained by linear
/// equalities/inequalities and second-order cones.
class ConicProgram {
  public:
    enum class VarKind { PsdBlock, NonnegScalar, FreeScalar };

    struct Variable {
        VarKind kind;
        int dim;  // PSD block dimension; 1 for scalars
        std::string name;
    };

    /// coeff * X[row, col] of variable var; symmetric entries may be
    /// referenced with either index order.
    struct Term {
        int var;
        int row;
        int col;
        double coeff;
    };

    struct LinExpr {
        std::vector<Term> terms;
        double constant = 0.0;

        void add(int var, int row, int col, double coeff) {
            if (coeff != 0.0) terms.push_back({var, row, col, coeff});
        }
        void add_scalar(int var, double coeff) { add(var, 0, 0, coeff); }
    };

    int add_psd_block(const std::string& name, int dim);
    int add_scalar(const std::string& name, bool nonnegative);
    int var_index(const std::string& name) const;
    const std::vector<Variable>& variables() const { return vars_; }

    void set_objective(LinExpr expr) { objective_ = std::move(expr); }
    const LinExpr& objective() const { return objective_; }

    void add_equality(LinExpr expr) { equalities_.push_back(std::move(expr)); }
    void add_inequality(LinExpr expr) { inequalities_.push_back(std::move(expr)); }
    /// components[0] >= || components[1..] ||.
    void add_soc(std::vector<LinExpr> components);

    const std::vector<LinExpr>& equalities() const { return equalities_; }
    const std::vector<LinExpr>& inequalities() const { return inequalities_; }
    const std::vector<std::vector<LinExpr>>& socs() const { return socs_; }

    /// Add scale * Re tr(C X_complex) of the Hermitian variable encoded by the
    /// 2n-dimensional PSD block var. C need not be Hermitian.
    void add_complex_trace(LinExpr& expr, int var, const CMat& c, double scale) const;
    /// Add scale * Im tr(C X_complex).
    void add_complex_trace_imag(LinExpr& expr, int var, const CMat& c, double scale) const;
    /// Equalities forcing the PSD block to be the embedding of a Hermitian
    /// matrix: equal diagonal copies and antisymmetric off-diagonal copies.
    void add_embedding_structure(int var);

    /// Sparse text dump (documented in the README): one `section indices...
    /// value` entry per line, suitable for cross-checking with external
    /// solvers.
    std::string dump() const;

    // ---- standard-form compilation (used by solver backends) ----

    struct Compiled {
        Vec c;                       // minimize c'x
        double objective_constant;   // maximize semantics: obj = constant - c'x
        Eigen::SparseMatrix<double> a;  // A x = b
        Vec b;
        Eigen::SparseMatrix<double> g;  // G x + s = h, s in K
        Vec h;
        int nonneg = 0;              // leading R+ rows of s
        std::vector<int> soc_dims;   // then SOC blocks
        std::vector<int> psd_dims;   // then PSD blocks (svec coordinates)
        std::vector<int> var_offset; // x offset per program variable
    };
    Compiled compile() const;

    /// Largest violation of all constraints (and PSD membership) at the given
    /// per-variable values, matrices indexed as declared.
    double max_violation(const std::vector<Mat>& values) const;

  private:
    std::vector<Variable> vars_;
    std::map<std::string, int> names_;
    LinExpr objective_;
    std::vector<LinExpr> equalities_;
    std::vector<LinExpr> inequalities_;
    std::vector<std::vector<LinExpr>> socs_;
};

}  // namespace disac

#endif
