#include <doctest.h>

#include "disac/conic_program.hpp"
#include "disac/ip_solver.hpp"
#include "disac/rng.hpp"

using namespace disac;

namespace {

CMat random_hermitian(RandomStream& rng, int n) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
    return 0.5 * (a + a.adjoint());
}

CMat random_psd(RandomStream& rng, int n) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
    return a * a.adjoint() / n;
}

}  // namespace

TEST_CASE("svec/smat round-trip and inner product") {
    RandomStream rng(3, "svec");
    Mat a(4, 4), b(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            a(i, j) = rng.gaussian();
            b(i, j) = rng.gaussian();
        }
    a = (0.5 * (a + a.transpose())).eval();
    b = (0.5 * (b + b.transpose())).eval();
    CHECK((smat(svec(a), 4) - a).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(svec(a).dot(svec(b)) == doctest::Approx((a * b).trace()).epsilon(1e-12));
}

TEST_CASE("embed_hermitian identity and spectrum") {
    CMat eye = CMat::Identity(3, 3);
    CHECK((embed_hermitian(eye) - Mat::Identity(6, 6)).norm() == doctest::Approx(0.0));

    // Pauli-Y has eigenvalues +-1; the embedding doubles their multiplicity.
    CMat pauli(2, 2);
    pauli << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    Eigen::SelfAdjointEigenSolver<Mat> es(embed_hermitian(pauli));
    Vec ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));
}

TEST_CASE("embed_hermitian preserves minimum eigenvalue of PSD matrices") {
    RandomStream rng(11, "embed");
    for (int rep = 0; rep < 5; ++rep) {
        CMat h = random_psd(rng, 5);
        Eigen::SelfAdjointEigenSolver<CMat> ec(h);
        Eigen::SelfAdjointEigenSolver<Mat> er(embed_hermitian(h));
        CHECK(std::abs(ec.eigenvalues().minCoeff() - er.eigenvalues().minCoeff()) < 1e-9);
    }
}

TEST_CASE("embed round-trip and trace identity") {
    RandomStream rng(12, "roundtrip");
    CMat h = random_hermitian(rng, 4);
    CHECK((extract_hermitian(embed_hermitian(h)) - h).norm() < 1e-12);

    CMat a = random_hermitian(rng, 4);
    double lhs = (embed_hermitian(h) * embed_hermitian(a)).trace();
    double rhs = 2.0 * (h * a).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

    CMat not_herm = CMat::Random(3, 3);
    not_herm(0, 1) += cplx(1.0, 1.0);
    CHECK_THROWS_AS(embed_hermitian(not_herm), DisacError);
}

TEST_CASE("solver: maximize tr(X) with tr(X) <= 1") {
    ConicProgram prog;
    int x = prog.add_psd_block("X", 3);
    ConicProgram::LinExpr obj, budget;
    for (int i = 0; i < 3; ++i) {
        obj.add(x, i, i, 1.0);
        budget.add(x, i, i, -1.0);
    }
    budget.constant = 1.0;
    prog.add_inequality(std::move(budget));
    prog.set_objective(std::move(obj));
    SolveReport report = solve(prog);
    REQUIRE(report.status == SolveStatus::Optimal);
    CHECK(report.objective_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(report.max_constraint_violation < 1e-6);
}

TEST_CASE("solver: second-order cone norm") {
    // minimize t subject to t >= ||(3, 4)||
    ConicProgram prog;
    int t = prog.add_scalar("t", false);
    ConicProgram::LinExpr obj;
    obj.add_scalar(t, -1.0);  // maximize -t
    prog.set_objective(std::move(obj));
    std::vector<ConicProgram::LinExpr> soc(3);
    soc[0].add_scalar(t, 1.0);
    soc[1].constant = 3.0;
    soc[2].constant = 4.0;
    prog.add_soc(std::move(soc));
    SolveReport report = solve(prog);
    REQUIRE(report.status == SolveStatus::Optimal);
    CHECK(report.objective_value == doctest::Approx(-5.0).epsilon(1e-7));
    CHECK(report.value(0)(0, 0) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("solver: largest eigenvalue as SDP") {
    RandomStream rng(21, "eigsdp");
    for (int rep = 0; rep < 3; ++rep) {
        int n = 4;
        Mat c(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = rng.gaussian();
        c = (0.5 * (c + c.transpose())).eval();
        ConicProgram prog;
        int x = prog.add_psd_block("X", n);
        ConicProgram::LinExpr obj, tr1;
        for (int i = 0; i < n; ++i) {
            obj.add(x, i, i, c(i, i));
            tr1.add(x, i, i, 1.0);
            for (int j = 0; j < i; ++j) obj.add(x, i, j, 2.0 * c(i, j));
        }
        tr1.constant = -1.0;
        prog.add_equality(std::move(tr1));
        prog.set_objective(std::move(obj));
        SolveReport report = solve(prog);
        REQUIRE(report.status == SolveStatus::Optimal);
        Eigen::SelfAdjointEigenSolver<Mat> es(c, Eigen::EigenvaluesOnly);
        CHECK(report.objective_value ==
              doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
    }
}

TEST_CASE("solver: complex eigenvalue problem through the embedding") {
    RandomStream rng(22, "ceig");
    CMat c = random_hermitian(rng, 3);
    ConicProgram prog;
    int x = prog.add_psd_block("X", 6);
    prog.add_embedding_structure(x);
    ConicProgram::LinExpr obj, tr1;
    prog.add_complex_trace(obj, x, c, 1.0);
    prog.add_complex_trace(tr1, x, CMat::Identity(3, 3), 1.0);
    tr1.constant = -1.0;
    prog.add_equality(std::move(tr1));
    prog.set_objective(std::move(obj));
    SolveReport report = solve(prog);
    REQUIRE(report.status == SolveStatus::Optimal);
    Eigen::SelfAdjointEigenSolver<CMat> es(c, Eigen::EigenvaluesOnly);
    CHECK(report.objective_value == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
    // solution must carry the embedding structure
    CMat h = extract_hermitian(report.value(x));
    CHECK((embed_hermitian(h) - report.value(x)).norm() < 1e-6);
}

TEST_CASE("solver: matrix dominance via slack blocks") {
    RandomStream rng(23, "dom");
    int n = 3;
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = rng.gaussian();
    b = (b * b.transpose()).eval();  // PSD target
    // minimize tr(X) s.t. X - S = B, S PSD  -> X* = B
    ConicProgram prog;
    int x = prog.add_psd_block("X", n);
    int s = prog.add_psd_block("S", n);
    ConicProgram::LinExpr obj;
    for (int i = 0; i < n; ++i) obj.add(x, i, i, -1.0);  // maximize -tr(X)
    prog.set_objective(std::move(obj));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            ConicProgram::LinExpr eq;
            eq.add(x, i, j, 1.0);
            eq.add(s, i, j, -1.0);
            eq.constant = -b(i, j);
            prog.add_equality(std::move(eq));
        }
    SolveReport report = solve(prog);
    REQUIRE(report.status == SolveStatus::Optimal);
    CHECK(report.objective_value == doctest::Approx(-b.trace()).epsilon(1e-6));
    CHECK((report.value(0) - b).norm() < 1e-5 * std::max(1.0, b.norm()));
}

TEST_CASE("solver: infeasibility certificate") {
    ConicProgram prog;
    int x = prog.add_psd_block("X", 2);
    ConicProgram::LinExpr le, ge, obj;
    le.add(x, 0, 0, -1.0);
    le.add(x, 1, 1, -1.0);
    le.constant = 1.0;  // tr(X) <= 1
    ge.add(x, 0, 0, 1.0);
    ge.add(x, 1, 1, 1.0);
    ge.constant = -2.0;  // tr(X) >= 2
    obj.add(x, 0, 0, 1.0);
    prog.add_inequality(std::move(le));
    prog.add_inequality(std::move(ge));
    prog.set_objective(std::move(obj));
    SolveReport report = solve(prog);
    CHECK(report.status == SolveStatus::Infeasible);
}

TEST_CASE("solver: unbounded certificate") {
    ConicProgram prog;
    int t = prog.add_scalar("t", true);
    int x = prog.add_psd_block("X", 2);
    ConicProgram::LinExpr obj;
    obj.add_scalar(t, 1.0);
    prog.set_objective(std::move(obj));
    ConicProgram::LinExpr tie;  // X11 = t keeps the PSD block referenced
    tie.add(x, 0, 0, 1.0);
    tie.add_scalar(t, -1.0);
    prog.add_equality(std::move(tie));
    SolveReport report = solve(prog);
    CHECK(report.status == SolveStatus::Unbounded);
}

TEST_CASE("solver: randomized conformance battery") {
    // Constructed primal: max <C, X> s.t. tr(X) = 1, <A_i, X> <= b_i with
    // b_i chosen so X = I/n is strictly feasible. The returned point must be
    // feasible and dominate every feasible rank-one candidate.
    RandomStream rng(31, "conformance");
    for (int rep = 0; rep < 4; ++rep) {
        int n = 3 + rep % 2;
        Mat c(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = rng.gaussian();
        c = (0.5 * (c + c.transpose())).eval();
        ConicProgram prog;
        int x = prog.add_psd_block("X", n);
        ConicProgram::LinExpr obj, tr1;
        for (int i = 0; i < n; ++i) {
            obj.add(x, i, i, c(i, i));
            tr1.add(x, i, i, 1.0);
            for (int j = 0; j < i; ++j) obj.add(x, i, j, 2.0 * c(i, j));
        }
        tr1.constant = -1.0;
        prog.add_equality(std::move(tr1));
        std::vector<Mat> cons;
        std::vector<double> slacks;
        for (int m = 0; m < 2; ++m) {
            Mat a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
            a = (0.5 * (a + a.transpose())).eval();
            double slack = 0.3 + 0.2 * m;
            ConicProgram::LinExpr ineq;
            for (int i = 0; i < n; ++i) {
                ineq.add(x, i, i, -a(i, i));
                for (int j = 0; j < i; ++j) ineq.add(x, i, j, -2.0 * a(i, j));
            }
            ineq.constant = a.trace() / n + slack;  // feasible at X = I/n
            prog.add_inequality(std::move(ineq));
            cons.push_back(a);
            slacks.push_back(a.trace() / n + slack);
        }
        prog.set_objective(std::move(obj));
        SolveReport report = solve(prog);
        REQUIRE(report.status == SolveStatus::Optimal);
        CHECK(report.max_constraint_violation < 1e-6);
        for (int trial = 0; trial < 200; ++trial) {
            Vec v(n);
            for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
            v.normalize();
            Mat cand = v * v.transpose();
            bool feasible = true;
            for (std::size_t m = 0; m < cons.size(); ++m)
                if ((cons[m] * cand).trace() > slacks[m]) feasible = false;
            if (feasible) CHECK((c * cand).trace() <= report.objective_value + 1e-6);
        }
    }
}

TEST_CASE("program dump lists variables and entries") {
    ConicProgram prog;
    int x = prog.add_psd_block("X", 2);
    ConicProgram::LinExpr obj;
    obj.add(x, 0, 0, 1.0);
    prog.set_objective(std::move(obj));
    std::string dump = prog.dump();
    CHECK(dump.find("var 0 psd 2 X") != std::string::npos);
    CHECK(dump.find("obj 0 0 0 0 1") != std::string::npos);
}
