#include "qamp/fock.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qamp;

TEST_CASE("coherent state: vacuum, Poisson mean, truncation tail")
{
    FockVector vac = coherent_state(0.0, 4);
    CHECK(vac.amp[0] == cx(1.0));
    for (int n = 1; n <= 4; ++n) CHECK(vac.amp[std::size_t(n)] == cx(0.0));
    CHECK(vac.leakage == 0.0);

    FockVector one = coherent_state(1.0, 30);
    CHECK(one.mean_photon() == doctest::Approx(1.0).epsilon(1e-10));

    // largest amplitude used anywhere in the scans
    FockVector big = coherent_state(1.72, 40);
    CHECK(big.leakage < 1e-12);
    const double tail = double(oracle::poisson_tail_above(1.72L * 1.72L, 40));
    CHECK(big.leakage == doctest::Approx(tail).epsilon(1e-6));

    CHECK_THROWS_AS(coherent_state(cx(std::numeric_limits<double>::infinity(), 0), 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(coherent_state(cx(0, std::numeric_limits<double>::quiet_NaN()), 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(coherent_state(1.0, -1), cutoff_error);
}

TEST_CASE("coherent leakage decreases monotonically with cutoff")
{
    double prev = 1.0;
    for (int cutoff : {5, 8, 12, 16, 20, 25}) {
        const double lk = coherent_state(1.3, cutoff).leakage;
        CHECK(lk <= prev);
        prev = lk;
    }
}

TEST_CASE("ladder operators act as sqrt(n) shifts")
{
    auto [a, ad] = ladder_operators(2);
    FockVector one = fock_state(1, 2);

    FockVector lowered = apply(a, one);
    CHECK(std::abs(lowered.amp[0] - cx(1.0)) < 1e-15);
    CHECK(std::abs(lowered.amp[1]) < 1e-15);

    FockVector raised = apply(ad, one);
    CHECK(std::abs(raised.amp[2] - cx(std::sqrt(2.0))) < 1e-15);

    CHECK_THROWS_AS(ladder_operators(0), cutoff_error);
}

TEST_CASE("ladder and number operators are exactly banded")
{
    const int cutoff = 7;
    auto [a, ad] = ladder_operators(cutoff);
    ModeOperator num = number_operator(cutoff);
    for (int i = 0; i <= cutoff; ++i)
        for (int j = 0; j <= cutoff; ++j) {
            if (j != i + 1) CHECK(a.mat(i, j) == cx(0.0));
            if (i != j + 1) CHECK(ad.mat(i, j) == cx(0.0));
            if (i != j) CHECK(num.mat(i, j) == cx(0.0));
        }
    for (int n = 1; n <= cutoff; ++n) {
        CHECK(a.mat(n - 1, n) == cx(std::sqrt(double(n))));
        CHECK(ad.mat(n, n - 1) == cx(std::sqrt(double(n))));
    }
}

TEST_CASE("commutator [a, a+] is the identity below the cutoff")
{
    const int cutoff = 9;
    auto [a, ad] = ladder_operators(cutoff);
    CMat comm = sub(matmul(a.mat, ad.mat), matmul(ad.mat, a.mat));
    for (int n = 0; n < cutoff; ++n)
        CHECK(std::abs(comm(n, n) - cx(1.0)) < 1e-14);
    // the top diagonal entry is clipped by truncation
    CHECK(comm(cutoff, cutoff).real() == doctest::Approx(-double(cutoff)));
    for (int n = 0; n <= cutoff; ++n)
        for (int m = 0; m <= cutoff; ++m)
            if (n != m) CHECK(std::abs(comm(n, m)) < 1e-15);
}

TEST_CASE("displacement operator: identity, coherent column, inverse")
{
    ModeOperator id = displacement_operator(0.0, 12);
    CHECK(max_abs_diff(id.mat, CMat::identity(13)) < 1e-14);

    const cx alpha(0.8, 0.45);
    const int cutoff = 22;
    ModeOperator d = displacement_operator(alpha, cutoff);

    FockVector displaced = apply(d, fock_state(0, cutoff));
    FockVector want = coherent_state(alpha, cutoff);
    for (int n = 0; n <= cutoff; ++n)
        CHECK(std::abs(displaced.amp[std::size_t(n)] - want.amp[std::size_t(n)]) < 1e-10);

    // inverse displacement: identity on the low-lying columns whose displaced
    // image still fits under the cutoff (displaced |n> spreads ~ 6|alpha|sqrt(n))
    ModeOperator dinv = displacement_operator(-alpha, cutoff);
    CMat prod = matmul(d.mat, dinv.mat);
    for (int n = 0; n <= 2; ++n)
        for (int m = 0; m <= cutoff; ++m)
            CHECK(std::abs(prod(m, n) - (n == m ? cx(1.0) : cx(0.0))) < 1e-10);

    // and exactly on states with truncation headroom
    FockVector probe = coherent_state(0.3, 30);
    probe.normalize();
    FockVector back = apply(displacement_operator(alpha, 30),
                            apply(displacement_operator(-alpha, 30), probe));
    for (int n = 0; n <= 30; ++n)
        CHECK(std::abs(back.amp[std::size_t(n)] - probe.amp[std::size_t(n)]) < 1e-10);

    CHECK_THROWS_AS(displacement_operator(2.0, 10), cutoff_error);
}

TEST_CASE("displacement matches the associated-Laguerre closed form")
{
    const cx alpha(0.9, -0.35);
    const int cutoff = 20;
    ModeOperator d = displacement_operator(alpha, cutoff);
    for (int m = 0; m <= cutoff - 8; ++m)
        for (int n = 0; n <= cutoff - 8; ++n)
            CHECK(std::abs(d.mat(m, n) - oracle::displacement_element(alpha, m, n)) < 1e-8);

    // the recurrence construction is exact on the whole block
    ModeOperator dr = displacement_columns(alpha, cutoff);
    for (int m = 0; m <= cutoff; ++m)
        for (int n = 0; n <= cutoff; ++n)
            CHECK(std::abs(dr.mat(m, n) - oracle::displacement_element(alpha, m, n)) < 1e-10);
}

TEST_CASE("displacement is unitary on its support")
{
    for (cx alpha : {cx(0.5, 0.0), cx(1.1, 0.7), cx(0.0, 1.6)}) {
        const int cutoff = default_cutoff(alpha, 0) + 12;
        ModeOperator d = displacement_operator(alpha, cutoff);
        CMat err = sub(matmul(adjoint(d.mat), d.mat), CMat::identity(d.mat.rows));
        // restrict to columns whose displaced image keeps its mass under the
        // cutoff (truncation leakage below 1e-10)
        std::vector<int> supported;
        for (int n = 0; n <= cutoff; ++n) {
            double colnorm = 0.0;
            for (int m = 0; m <= cutoff; ++m) colnorm += std::norm(d.mat(m, n));
            if (1.0 - colnorm < 1e-10) supported.push_back(n);
        }
        CHECK(supported.size() > 4); // the low-lying block must qualify
        for (int n : supported)
            for (int m : supported)
                CHECK(std::abs(err(std::size_t(n), std::size_t(m))) < 1e-10);
    }
}

TEST_CASE("beam splitter: identity, single photon, coherent factorization")
{
    TwoModeOperator full = beam_splitter(1.0, 3, 3);
    CHECK(max_abs_diff(full.mat, CMat::identity(16)) < 1e-14);

    TwoModeOperator half = beam_splitter(0.5, 2, 2);
    TwoModeState in = tensor(fock_state(1, 2), fock_state(0, 2));
    TwoModeState out = apply(half, in);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amp(1, 0) - cx(inv_sqrt2)) < 1e-12);
    CHECK(std::abs(out.amp(0, 1) - cx(inv_sqrt2)) < 1e-12);
    CHECK(std::abs(out.amp(1, 1)) < 1e-14);

    // coherent in, coherent pair out: t alpha transmitted, r alpha reflected
    const double T = 0.73;
    const cx alpha(0.9, 0.2);
    const int n = 26; // headroom so clipped total-n blocks sit below 1e-10 amplitude
    TwoModeOperator bs = beam_splitter(T, n, n);
    TwoModeState inp = tensor(coherent_state(alpha, n), coherent_state(0.0, n));
    TwoModeState outp = apply(bs, inp);
    FockVector ta = coherent_state(std::sqrt(T) * alpha, n);
    FockVector ra = coherent_state(std::sqrt(1 - T) * alpha, n);
    TwoModeState want = tensor(ta, ra);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            CHECK(std::abs(outp.amp(i, j) - want.amp(i, j)) < 1e-10);

    CHECK_THROWS_AS(beam_splitter(0.0, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter(1.2, 3, 3), std::invalid_argument);
}

TEST_CASE("beam splitter conserves total photon number structurally")
{
    TwoModeOperator bs = beam_splitter(0.82, 5, 4);
    // structural zeros: entries across different total-n blocks are exactly 0
    int checked = 0;
    for (int ia = 0; ia <= 5; ++ia)
        for (int ib = 0; ib <= 4; ++ib)
            for (int ja = 0; ja <= 5; ++ja)
                for (int jb = 0; jb <= 4; ++jb)
                    if (ia + ib != ja + jb) {
                        CHECK(bs.mat(std::size_t(ia) * 5 + ib, std::size_t(ja) * 5 + jb)
                              == cx(0.0));
                        ++checked;
                    }
    CHECK(checked > 0);
}

TEST_CASE("beam splitter and squeezer unitarity")
{
    TwoModeOperator bs = beam_splitter(0.9, 6, 6);
    CMat e1 = sub(matmul(adjoint(bs.mat), bs.mat), CMat::identity(bs.mat.rows));
    CHECK(max_abs(e1) < 1e-12);

    TwoModeOperator sq = two_mode_squeezer(0.2, 14, 14);
    CMat e2 = sub(matmul(adjoint(sq.mat), sq.mat), CMat::identity(sq.mat.rows));
    CHECK(max_abs(e2) < 1e-12);
}

TEST_CASE("blockwise unitaries compose along their one-parameter groups")
{
    // beam-splitter angles add: U(t1) U(t2) = U(cos(th1+th2)^2)
    const double t1 = 0.9, t2 = 0.8;
    const double th = std::acos(std::sqrt(t1)) + std::acos(std::sqrt(t2));
    TwoModeOperator a = beam_splitter(t1, 6, 6);
    TwoModeOperator b = beam_splitter(t2, 6, 6);
    TwoModeOperator c = beam_splitter(std::cos(th) * std::cos(th), 6, 6);
    CHECK(max_abs_diff(matmul(a.mat, b.mat), c.mat) < 1e-12);

    // squeezing parameters add: S(r1) S(r2) = S(r1 + r2)
    TwoModeOperator s1 = two_mode_squeezer(0.08, 16, 16);
    TwoModeOperator s2 = two_mode_squeezer(0.12, 16, 16);
    TwoModeOperator s3 = two_mode_squeezer(0.20, 16, 16);
    CHECK(max_abs_diff(matmul(s1.mat, s2.mat), s3.mat) < 1e-11);
}

TEST_CASE("two-mode squeezer: identity at r=0, pair ladder on vacuum")
{
    TwoModeOperator id = two_mode_squeezer(0.0, 4, 4);
    CHECK(max_abs_diff(id.mat, CMat::identity(25)) < 1e-14);

    const double r = 0.2;
    const int n = 14;
    TwoModeOperator sq = two_mode_squeezer(r, n, n);
    TwoModeState out = apply(sq, tensor(fock_state(0, n), fock_state(0, n)));

    const double lambda = std::tanh(r);
    const double norm = std::sqrt(1.0 - lambda * lambda);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            if (i == j)
                CHECK(std::abs(out.amp(i, i) - cx(norm * std::pow(lambda, i))) < 1e-8);
            else
                CHECK(std::abs(out.amp(i, j)) < 1e-14);
        }

    DensityOperator reduced = partial_trace(out, Mode::B);
    const double want = std::sinh(r) * std::sinh(r);
    CHECK(reduced.mean_photon() == doctest::Approx(want).epsilon(1e-8));

    CHECK_THROWS_AS(two_mode_squeezer(0.5, 5, 5), cutoff_error);
}

TEST_CASE("tensor, partial trace, and projection")
{
    FockVector psi = coherent_state(cx(0.5, 0.3), 8);
    psi.normalize();
    FockVector phi = coherent_state(cx(-0.2, 0.6), 8);
    phi.normalize();

    TwoModeState prod = tensor(psi, phi);
    DensityOperator rho = partial_trace(prod, Mode::B);
    DensityOperator proj = DensityOperator::pure(psi);
    CHECK(max_abs_diff(rho.mat, proj.mat) < 1e-12);
    CHECK(fidelity(rho, psi) == doctest::Approx(1.0).epsilon(1e-12));

    // vacuum projection probabilities
    TwoModeState vacvac = tensor(fock_state(0, 2), fock_state(0, 2));
    Projection p0 = project_mode(vacvac, Mode::B, fock_state(0, 2));
    CHECK(p0.probability == doctest::Approx(1.0));

    TwoModeOperator half = beam_splitter(0.5, 2, 2);
    TwoModeState split = apply(half, tensor(fock_state(1, 2), fock_state(0, 2)));
    Projection p1 = project_mode(split, Mode::B, fock_state(0, 2));
    CHECK(p1.probability == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(project_mode(split, Mode::B, fock_state(0, 5)), dimension_error);
}

TEST_CASE("fidelity and purity")
{
    FockVector psi = coherent_state(0.7, 10);
    psi.normalize();
    DensityOperator pure = DensityOperator::pure(psi);
    CHECK(fidelity(pure, psi) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-12));

    // maximally mixed on the {|0>,|1>} subspace
    DensityOperator mixed(10);
    mixed.mat(0, 0) = 0.5;
    mixed.mat(1, 1) = 0.5;
    FockVector in_plane = fock_state(0, 10);
    CHECK(fidelity(mixed, in_plane) == doctest::Approx(0.5));
    CHECK(purity(mixed) == doctest::Approx(0.5));

    // explicit two-component mixture against the direct sum
    FockVector a = coherent_state(0.4, 10);
    a.normalize();
    FockVector b = coherent_state(cx(0.1, -0.8), 10);
    b.normalize();
    DensityOperator mix(10);
    axpy(mix.mat, 0.3, DensityOperator::pure(a).mat);
    axpy(mix.mat, 0.7, DensityOperator::pure(b).mat);
    const double direct = 0.3 * fidelity(a, psi) + 0.7 * fidelity(b, psi);
    CHECK(fidelity(mix, psi) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("uhlmann fidelity agrees with the pure-state overlap")
{
    FockVector a = coherent_state(0.6, 8);
    a.normalize();
    FockVector b = coherent_state(cx(0.2, 0.5), 8);
    b.normalize();
    const double want = fidelity(a, b);
    const double got = uhlmann_fidelity(DensityOperator::pure(a), DensityOperator::pure(b));
    CHECK(got == doctest::Approx(want).epsilon(1e-7));
}

TEST_CASE("quadrature moments of a coherent state")
{
    FockVector psi = coherent_state(cx(0.9, 0.4), 25);
    psi.normalize();
    DensityOperator rho = DensityOperator::pure(psi);
    QuadMoments m = quadrature_moments(rho, 0.0);
    CHECK(m.v_x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(m.v_p == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(m.mean_x == doctest::Approx(std::sqrt(2.0) * 0.9).epsilon(1e-10));
    CHECK(m.mean_p == doctest::Approx(std::sqrt(2.0) * 0.4).epsilon(1e-10));
    CHECK(std::abs(m.cov) < 1e-10);
}

TEST_CASE("leakage grows monotonically across truncating operations")
{
    FockVector psi = coherent_state(1.1, 24);
    double last = psi.leakage;
    for (int step = 0; step < 3; ++step) {
        psi = displace_state(psi, cx(0.3, -0.2));
        CHECK(psi.leakage >= last);
        last = psi.leakage;
        psi.normalize();
    }
}

TEST_CASE("quadrature operators square to the right second moment")
{
    // <x^2> on vacuum must be 1/2 in this convention
    auto [x, p] = quadrature_operators(0.35, 12);
    FockVector vac = fock_state(0, 12);
    const cvec xv = matvec(x.mat, vac.amp);
    CHECK(norm2(xv) == doctest::Approx(0.5).epsilon(1e-12));
    const cvec pv = matvec(p.mat, vac.amp);
    CHECK(norm2(pv) == doctest::Approx(0.5).epsilon(1e-12));
}
