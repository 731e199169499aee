#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "zetaprog/zeta_engine.hpp"

using namespace zetaprog;

namespace {

struct OraclePoint {
  double sigma;
  long n;
  double re;
  double im;
};

// mpmath at 100 digits, s = sigma + 2 pi i n / log 2
const OraclePoint kOracle[] = {
    {0.0, 1, 1.59873452680868982867629281801508378112, 0.2783386696390827176571434080459565132866},
    {0.0, 2, 3.074234949730233501418375349712871527756, -0.5396385820603566547182314128184900427294},
    {0.0, 3, 3.661628777732160613884616343610023181602, 1.803563011234848084674617548801937239008},
    {0.0, 4, 2.393324028141009726679263178482313593247, -3.273798129782310761312015864254191198002},
    {0.0, 5, 5.888115071145803740461901902349011149674, 2.183027853614196118201979661557748544753},
    {0.0, 10, 9.599190734743031765862638713373055119464, 1.718022868929664741501847777261829958157},
    {0.0, 20, 9.544291627614871950785225969266171335626, -2.447658042333086104922231486320638582891},
    {0.0, 50, -2.993888633399636011257694107405531793982, -19.14606868696872176579707297977223708919},
    {0.0, 100, 16.14507950001016886629446071736849345186, 14.75909721559467835108001358225551217158},
    {0.0, 1000, 1.694941544457491579016019204061929595328, 102.0928452869650373823626168816660670194},
    {0.0, 10000, -40.95904418554360460767061002419700371708, 121.5174949054855063243982256510519406007},
    {0.5, 1, 1.458458222095160736580369837757967806408, 0.1758571022622438901825983684716071976548},
    {0.5, 7, 3.621332440289394188252919906239212843771, -1.554791051078556315225532490257206814839},
    {0.5, 300, 1.281065063932337925136968196615464445143, -2.365495213247612151964774663709181837388},
    {1.0, 50, 1.873651041957786368061288380138142802598, -1.302097029103682184097007372147242437311},
};

double distance(const ComplexApprox& a, double re, double im) { return std::abs(a.value() - std::complex<double>(re, im)); }

}  // namespace

TEST_CASE("real special values") {
  const double pi = std::numbers::pi;
  const ComplexApprox z2 = zeta_em({2.0, 0.0}, 1e-13);
  CHECK(distance(z2, pi * pi / 6.0, 0.0) <= 1e-12);
  CHECK(distance(z2, pi * pi / 6.0, 0.0) <= z2.err + 1e-15);
  const ComplexApprox z0 = zeta_em({0.0, 0.0}, 1e-13);
  CHECK(distance(z0, -0.5, 0.0) <= 1e-12);
  const ComplexApprox z4 = zeta_em({4.0, 0.0}, 1e-13);
  CHECK(distance(z4, std::pow(pi, 4) / 90.0, 0.0) <= z4.err + 1e-15);
  // zeta(1/2) = -1.4603545088095868128894991525152980125...
  const ComplexApprox zh = zeta_em({0.5, 0.0}, 1e-12);
  CHECK(distance(zh, -1.4603545088095868128894991525, 0.0) <= zh.err + 1e-15);
}

TEST_CASE("progression points enclose the high-precision oracle") {
  for (const auto& o : kOracle) {
    CAPTURE(o.sigma);
    CAPTURE(o.n);
    for (const double tol : {1e-6, 1e-10}) {
      const ComplexApprox z = zeta_progression(2, o.n, o.sigma, tol);
      CHECK(z.err <= tol);
      CHECK(distance(z, o.re, o.im) <= z.err);
    }
    // the generic height path agrees too, with a rounded height
    const double t = 2.0 * std::numbers::pi * static_cast<double>(o.n) / std::log(2.0);
    const ComplexApprox g = zeta_em({o.sigma, t}, 1e-8);
    CHECK(distance(g, o.re, o.im) <= g.err + 1e-15 * t * 40.0);
  }
}

TEST_CASE("conjugate symmetry and negative heights") {
  const ComplexApprox a = zeta_progression(3, 17, 0.25, 1e-9);
  const ComplexApprox b = zeta_progression(3, -17, 0.25, 1e-9);
  CHECK(a.re == b.re);
  CHECK(a.im == -b.im);
  const ComplexApprox c = zeta_em({0.3, -40.0}, 1e-9);
  const ComplexApprox d = zeta_em({0.3, 40.0}, 1e-9);
  CHECK(c.im == -d.im);
}

TEST_CASE("tighter tolerance never loosens the error") {
  double prev = 1.0;
  for (const double tol : {1e-3, 1e-5, 1e-7, 1e-9, 1e-11}) {
    const ComplexApprox z = zeta_progression(5, 40, 0.0, tol);
    CHECK(z.err <= tol);
    CHECK(z.err <= prev);
    prev = z.err;
  }
}

TEST_CASE("parameter choice respects the remainder target") {
  for (const double t : {0.0, 1.0, 100.0, 5000.0}) {
    for (const double tol : {1e-4, 1e-10}) {
      const EmParams p = choose_em_params(0.5, t, tol);
      CHECK(p.n_terms >= std::max<std::int64_t>(16, static_cast<std::int64_t>(std::ceil(t / 3.0))));
      CHECK(p.remainder_bound <= tol / 2);
      CHECK(em_remainder_bound(0.5, t, p.n_terms, p.bernoulli_order) == doctest::Approx(p.remainder_bound));
    }
  }
}

TEST_CASE("preconditions and failure modes") {
  CHECK_THROWS_AS(zeta_em({1.0, 0.0}, 1e-8), PreconditionError);
  CHECK_THROWS_AS(zeta_em({-0.5, 3.0}, 1e-8), PreconditionError);
  CHECK_THROWS_AS(zeta_em({0.5, 3.0}, 1e-16), PreconditionError);
  CHECK_THROWS_AS(zeta_em({0.5, 2e8}, 1e-8), ToleranceError);
  ZetaLimits tight;
  tight.n_max = 100;
  CHECK_THROWS_AS(zeta_em({0.5, 10000.0}, 1e-8, tight), ToleranceError);
  CHECK_THROWS_AS(zeta_progression(1, 3, 0.0, 1e-8), PreconditionError);
}

TEST_CASE("log gamma against known values") {
  // log Gamma(1) = 0, Gamma(1/2) = sqrt(pi), Gamma(5) = 24
  CHECK(std::abs(log_gamma({1.0, 0.0}).value()) <= log_gamma({1.0, 0.0}).err + 1e-15);
  const ComplexApprox h = log_gamma({0.5, 0.0});
  CHECK(std::abs(h.value() - 0.5 * std::log(std::numbers::pi)) <= h.err);
  const ComplexApprox f = log_gamma({5.0, 0.0});
  CHECK(std::abs(f.value() - std::log(24.0)) <= f.err);
  // Gamma(1 + i): |Gamma(1 + i)|^2 = pi / sinh(pi)
  const ComplexApprox g = log_gamma({1.0, 1.0});
  CHECK(std::abs(2.0 * g.re - std::log(std::numbers::pi / std::sinh(std::numbers::pi))) <= 2.0 * g.err);
  // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
  const std::complex<double> z(-2.3, 0.7);
  const std::complex<double> lhs = std::exp(log_gamma(z).value() + log_gamma(1.0 - z).value());
  const std::complex<double> rhs = std::numbers::pi / std::sin(std::numbers::pi * z);
  CHECK(std::abs(lhs / rhs - 1.0) <= 1e-12);
  CHECK_THROWS_AS(log_gamma({-3.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(log_gamma({0.0, 1e-8}), PreconditionError);
}

TEST_CASE("chi identities") {
  const ComplexApprox half = chi({0.5, 0.0});
  CHECK(std::abs(half.value() - 1.0) <= half.err + 1e-15);
  for (const double t : {0.3, 2.0, 14.1, 100.0, 1234.5}) {
    for (const double sigma : {0.0, 0.25, 0.5, 0.8}) {
      const ComplexApprox a = chi({sigma, t});
      const ComplexApprox b = chi({1.0 - sigma, -t});
      const ComplexApprox p = a * b;
      CAPTURE(t);
      CAPTURE(sigma);
      CHECK(std::abs(p.value() - 1.0) <= p.err + 1e-15);
      CHECK(p.err <= 1e-9);
    }
  }
  // large t: the asymptotic form is accurate to O(1/t)
  const ComplexApprox big = chi({0.0, 5000.0});
  CHECK(std::abs(big.value() / chi_asymptotic(0.0, 5000.0) - 1.0) <= 1e-3);
  // chi(2) = 2 pi^2 sec(pi) / Gamma(2) * ... equals zeta(2) / zeta(-1) = (pi^2/6) / (-1/12)
  const ComplexApprox two = chi({2.0, 0.0});
  CHECK(std::abs(two.value() - (-2.0 * std::numbers::pi * std::numbers::pi)) <= two.err + 1e-12);
  CHECK_THROWS_AS(chi({1.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(chi({3.0, 5e-7}), PreconditionError);
  CHECK_THROWS_AS(chi({-2.0, 0.0}), PreconditionError);
}

TEST_CASE("functional equation self-check") {
  const std::vector<double> ts = {0.0, 1.0, 9.06, 14.134725, 50.0, 321.0};
  const FunctionalEquationReport rep = selfcheck_functional_equation(ts, 1e-10);
  REQUIRE(rep.samples.size() == ts.size());
  CHECK(rep.samples[0].skipped);
  CHECK(!rep.samples[0].note.empty());
  for (std::size_t i = 1; i < ts.size(); ++i) {
    CAPTURE(ts[i]);
    CHECK(rep.samples[i].verdict == Verdict::pass);
    CHECK(rep.samples[i].budget <= 1e-7);
  }
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.max_residual <= 1e-8);
}
