#include "zetaprog/bernoulli.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <array>

namespace zetaprog {

namespace {

struct Rational {
  const char* num;
  const char* den;
};

// B_2, B_4, ..., B_62 as exact rationals.
constexpr std::array<Rational, kBernoulliRows> kBernoulli{{
    {"1", "6"},  // B_2
    {"-1", "30"},  // B_4
    {"1", "42"},  // B_6
    {"-1", "30"},  // B_8
    {"5", "66"},  // B_10
    {"-691", "2730"},  // B_12
    {"7", "6"},  // B_14
    {"-3617", "510"},  // B_16
    {"43867", "798"},  // B_18
    {"-174611", "330"},  // B_20
    {"854513", "138"},  // B_22
    {"-236364091", "2730"},  // B_24
    {"8553103", "6"},  // B_26
    {"-23749461029", "870"},  // B_28
    {"8615841276005", "14322"},  // B_30
    {"-7709321041217", "510"},  // B_32
    {"2577687858367", "6"},  // B_34
    {"-26315271553053477373", "1919190"},  // B_36
    {"2929993913841559", "6"},  // B_38
    {"-261082718496449122051", "13530"},  // B_40
    {"1520097643918070802691", "1806"},  // B_42
    {"-27833269579301024235023", "690"},  // B_44
    {"596451111593912163277961", "282"},  // B_46
    {"-5609403368997817686249127547", "46410"},  // B_48
    {"495057205241079648212477525", "66"},  // B_50
    {"-801165718135489957347924991853", "1590"},  // B_52
    {"29149963634884862421418123812691", "798"},  // B_54
    {"-2479392929313226753685415739663229", "870"},  // B_56
    {"84483613348880041862046775994036021", "354"},  // B_58
    {"-1215233140483755572040304994079820246041491", "56786730"},  // B_60
    {"12300585434086858541953039857403386151", "6"},  // B_62
}};

std::array<BernoulliRow, kBernoulliRows> build_table() {
  std::array<BernoulliRow, kBernoulliRows> out{};
  mpfr_t x, f, tmp;
  mpfr_inits2(256, x, f, tmp, static_cast<mpfr_ptr>(nullptr));
  for (int j = 1; j <= kBernoulliRows; ++j) {
    const mpq_class b(mpz_class(kBernoulli[j - 1].num), mpz_class(kBernoulli[j - 1].den));
    mpfr_set_q(x, b.get_mpq_t(), MPFR_RNDN);
    BernoulliRow& row = out[j - 1];
    row.b = mpfr_get_d(x, MPFR_RNDN);
    mpfr_fac_ui(f, static_cast<unsigned long>(2 * j), MPFR_RNDN);
    mpfr_div(tmp, x, f, MPFR_RNDN);
    row.over_factorial = mpfr_get_d(tmp, MPFR_RNDN);
    mpfr_abs(tmp, tmp, MPFR_RNDN);
    mpfr_log(tmp, tmp, MPFR_RNDN);
    row.log_abs_over_factorial = mpfr_get_d(tmp, MPFR_RNDU);
    mpfr_div_ui(tmp, x, static_cast<unsigned long>(2 * j * (2 * j - 1)), MPFR_RNDN);
    row.stirling = mpfr_get_d(tmp, MPFR_RNDN);
    mpfr_abs(tmp, tmp, MPFR_RNDN);
    mpfr_log(tmp, tmp, MPFR_RNDN);
    row.log_abs_stirling = mpfr_get_d(tmp, MPFR_RNDU);
  }
  mpfr_clears(x, f, tmp, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace

const BernoulliRow& bernoulli_row(int j) {
  static const std::array<BernoulliRow, kBernoulliRows> table = build_table();
  return table.at(static_cast<std::size_t>(j - 1));
}

}  // namespace zetaprog
