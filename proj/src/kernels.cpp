#include "kernels.hpp"

#include <cmath>

namespace cskit::detail {

namespace {

// pi/2 split so that q * kPio2Hi is exact for |q| < 2^20.
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2Hi = 1.5707963267341256e+00;
constexpr double kPio2Mid = 6.0771005065061922e-11;
constexpr double kPio2Lo = 2.0222662487959506e-21;
constexpr double kShifter = 6755399441055744.0;
constexpr double kReduceLimit = 1e5;

__attribute__((target_clones("avx2", "default"))) void sincos_poly(const double* __restrict t,
                                                                    double* __restrict s,
                                                                    double* __restrict c, long n) {
  for (long i = 0; i < n; ++i) {
    const double x = t[i];
    const double qd = (x * kTwoOverPi + kShifter) - kShifter;
    const int q = static_cast<int>(qd);
    const double r = ((x - qd * kPio2Hi) - qd * kPio2Mid) - qd * kPio2Lo;
    const double z = r * r;
    const double sp =
        r + r * z *
                (-1.66666666666666307295e-1 +
                 z * (8.33333333332211858878e-3 +
                      z * (-1.98412698295895385996e-4 +
                           z * (2.75573136213857245213e-6 +
                                z * (-2.50507477628578072866e-8 + z * 1.58962301576546568060e-10)))));
    const double cp =
        1.0 - 0.5 * z +
        z * z *
            (4.16666666666665929218e-2 +
             z * (-1.38888888888730564116e-3 +
                  z * (2.48015872888517045348e-5 +
                       z * (-2.75573141792967388112e-7 +
                            z * (2.08757008419747316778e-9 + z * -1.13585365213876817300e-11)))));
    const bool swap = (q & 1) != 0;
    const double ss = swap ? cp : sp;
    const double cc = swap ? sp : cp;
    s[i] = (q & 2) ? -ss : ss;
    c[i] = ((q + 1) & 2) ? -cc : cc;
  }
}

}  // namespace

void sincos_block(const double* t, double* s, double* c, long n) {
  sincos_poly(t, s, c, n);
  for (long i = 0; i < n; ++i) {
    if (!(std::abs(t[i]) <= kReduceLimit)) {
      s[i] = std::sin(t[i]);
      c[i] = std::cos(t[i]);
    }
  }
}

}  // namespace cskit::detail
