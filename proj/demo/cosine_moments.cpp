// Exact moments and cumulants of the cosine sum over a_k = 2^k, next to the
// i.i.d. values, followed by the normalized MGF residual on a fast schedule.
#include "lacuna/cumulants.hpp"
#include "lacuna/mgf.hpp"
#include "lacuna/moments.hpp"

#include <cstdio>

int main() {
  using namespace lacuna;
  const auto f = TrigPoly::cosine();
  const auto seq = build_sequence(GeometricSpec{2, 2}, 8);
  std::printf("%-3s %-3s %-14s %-14s %-14s\n", "n", "m", "E S_n^m", "E T_n^m", "gamma_m(S_n)");
  for (std::size_t n : {4, 8}) {
    auto dep = moment_table(f, seq, n, 6, MomentKind::dependent);
    auto iid = moment_table(f, seq, n, 6, MomentKind::iid);
    auto cum = cumulants_of(dep);
    for (unsigned m = 2; m <= 6; m += 2) {
      std::printf("%-3zu %-3u %-14s %-14s %-14s\n", n, m, to_string(dep[m]).c_str(), to_string(iid[m]).c_str(),
                  to_string(cum[m]).c_str());
    }
  }

  const auto fast = build_sequence(ScheduleSpec{2, 4}, 6);
  const auto target = ModGaussianTarget::of(f);
  std::printf("\nrho = %u, gamma_rho = %s\n", target.rho, to_string(target.gamma_rho).c_str());
  for (std::size_t n = 3; n <= 6; ++n) {
    auto r = mod_gaussian_residual(f, fast, n, target, 1.0L, Normalization::per_term_variance);
    std::printf("n=%zu residual=%.12Lf distance=%.3Le\n", n, r.residual.real(), r.distance);
  }
}
