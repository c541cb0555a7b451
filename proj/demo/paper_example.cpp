// Walks through the reference five-level state: critical times, the
// degree-34 minorant, permissible times at two fidelities and the jumps of
// the tau_min scan.
#include <qsl/qsl.hpp>

#include <cstdio>

using R = qsl::real256;

namespace {

void print_set(const char* label, const qsl::IntervalSet<R>& set)
{
    std::printf("%s:", label);
    for (const auto& iv : set.intervals) {
        if (iv.degenerate)
            std::printf(" {%.4f}", qsl::to_double(iv.lo));
        else
            std::printf(" [%.4f, %.4f]", qsl::to_double(iv.lo), qsl::to_double(iv.hi));
    }
    std::printf("\n");
}

} // namespace

int main()
{
    const auto pe = qsl::build_pe<R>();
    const auto& ct = pe.times;
    std::printf("tau_c1 = %.6f  tau_c2 = %.6f  sqrt(F_c2) = %.6f\n", qsl::to_double(ct.tau_c1),
                qsl::to_double(ct.tau_c2), qsl::to_double(ct.sqrt_f_c2));

    std::printf("p_e degree %d, certified: subdivision %s, derivative count %s\n", pe.p.degree(),
                pe.subdivision.verified ? "yes" : "no", pe.derivative_count.verified ? "yes" : "no");
    for (int k = 0; k <= 6; k += 2)
        std::printf("  x^%d: %s\n", k, qsl::to_decimal(pe.p[k], 8).c_str());

    const auto m = qsl::paper_moments<R>(pe.p.degree());
    print_set("permissible times at sqrt(F) = 0", qsl::permissible_times(pe.p, m, R(0)));
    print_set("permissible times at sqrt(F_c2)", qsl::permissible_times(pe.p, m, ct.sqrt_f_c2));

    const auto curve = qsl::tau_min_scan(pe.p, m, qsl::default_fidelity_grid<R>(401));
    for (const auto& j : curve.jumps)
        std::printf("tau_min jumps at sqrt(F) = %.6f: %.4f -> %.4f\n", qsl::to_double(j.sqrt_f),
                    qsl::to_double(j.tau_before), qsl::to_double(j.tau_after));
    return 0;
}
