// Walks through the two worked spaces: zeros of B_gamma for PW and the
// cross, their Gram conditioning, and the exceptional diagonal series.
#include <cstdio>
#include <vector>

#include "cdb/cdb.hpp"

using namespace cdb;

namespace {

void report(const char* title, const WorkedSpace& ws, Complex gamma, const Rect& region) {
    const ZeroReport zeros = find_zeros(ws.closed_form(gamma), region);
    const KernelFrameReport g = gram(*ws.spectrum, zeros.locations());
    std::printf("%s, gamma = %g%+gi: %zu zeros in [%g,%g]x[%g,%g]\n", title, gamma.real(), gamma.imag(),
                zeros.zeros.size(), region.x0, region.x1, region.y0, region.y1);
    for (std::size_t i = 0; i < zeros.zeros.size() && i < 6; ++i) {
        const Complex z = zeros.zeros[i].location;
        std::printf("  %+.12f %+.12fi\n", z.real(), z.imag());
    }
    std::printf("  gram: lambda_min %.3e, lambda_max %.3e, condition %.3e\n", g.lambda_min, g.lambda_max,
                g.condition);
}

}  // namespace

int main() {
    const WorkedSpace pw = pw_spectrum(200);
    report("PW", pw, 1.0, Rect{-5.25, 5.25, -1.0, 1.0});
    std::printf("  zero free at gamma = pi i: %s\n\n", pw.zero_free(kPi * kI) ? "yes" : "no");

    const WorkedSpace cross = cross_pw_spectrum(200);
    report("cross", cross, Complex{1.0, 0.5}, Rect{-4.1, 4.1, -4.1, 4.1});

    const ExceptionalData ex = exceptional_data();
    const MeromorphicHandle h = cross.closed_form(ex.reference_gamma);
    std::printf("\ncross at gamma = pi(1-i): diagonal series k/2 - 1/8 (1+i)\n");
    for (int k = 1; k <= 6; ++k) {
        const Complex w = ExceptionalData::diagonal(k);
        const auto z = polish_zero(h, w, 0.1);
        std::printf("  k=%d predicted %+.6f%+.6fi located %s\n", k, w.real(), w.imag(),
                    z ? "yes" : "no");
    }
    return 0;
}
