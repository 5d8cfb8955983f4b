#ifndef DISAC_IP_SOLVER_HPP
#define DISAC_IP_SOLVER_HPP

#include <string>
#include <vector>

#include "disac/conic_program.hpp"

namespace disac {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };

std::string to_string(SolveStatus s);

struct SolverSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    int max_iterations = 100;
    double step_scale = 0.99;
    double static_regularization = 1e-11;
    bool iterative_refinement = true;
};

struct SolveReport {
    SolveStatus status = SolveStatus::NumericalTrouble;
    double objective_value = 0.0;     // value of the maximized objective
    std::vector<Mat> variable_values; // one matrix per program variable (1x1 for scalars)
    int solver_iterations = 0;
    double max_constraint_violation = 0.0;
    double duality_gap = 0.0;
    std::string message;

    const Mat& value(int var) const { return variable_values.at(var); }
};

/// Solve a ConicProgram with the built-in primal-dual interior-point backend
/// (Nesterov-Todd scaling, Mehrotra predictor-corrector, dense KKT solves).
/// Backend failures surface as status NumericalTrouble, not exceptions.
SolveReport solve(const ConicProgram& program, const SolverSettings& settings = {});

/// Standard-form cone LP interface used internally and by conformance tests:
/// minimize c'x subject to A x = b, G x + s = h, s in
/// R+^nonneg x SOC(soc_dims) x PSD(psd_dims).
struct ConeLpResult {
    SolveStatus status = SolveStatus::NumericalTrouble;
    Vec x, y, z, s;
    int iterations = 0;
    double gap = 0.0, primal_residual = 0.0, dual_residual = 0.0;
    std::string message;
};

ConeLpResult solve_conelp(const Vec& c, const Eigen::SparseMatrix<double>& a, const Vec& b,
                          const Eigen::SparseMatrix<double>& g, const Vec& h, int nonneg,
                          const std::vector<int>& soc_dims, const std::vector<int>& psd_dims,
                          const SolverSettings& settings = {});

}  // namespace disac

#endif
