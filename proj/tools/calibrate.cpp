// Scratch sweep over candidate gain sets; prints per-case CCA/CCT errors.
#include <cstdio>
#include <vector>

#include "gse/eac.hpp"

int main(int argc, char** argv) {
    using namespace gse;
    model::SystemParams p;
    if (argc >= 4) {
        p.k_ppll = std::atof(argv[1]);
        p.k_ipll = std::atof(argv[2]);
        p.K_ramp = std::atof(argv[3]);
    }
    sim::IntegratorConfig cfg;
    const double i_d1 = 0.8;
    std::vector<std::pair<double, double>> cases = {
        {0.2, 0.4}, {0.2, 0.5}, {0.1, 0.25}, {0.1, 0.4}, {0.0, 0.2}, {0.0, 0.3}};
    double s1 = 0, s2 = 0, s3 = 0, c3max = -1;
    int n = 0;
    std::printf("k_ppll=%g k_ipll=%g K_ramp=%g\n", p.k_ppll, p.k_ipll, p.K_ramp);
    std::printf("U_g2  i_d2   phi_or  phi1    phi2    phi3    e1%%     e2%%     e3%%    t_or    t3      et3%%\n");
    for (auto [ug2, id2] : cases) {
        model::Scenario sc;
        sc.U_g2 = ug2;
        sc.i_d1 = i_d1;
        sc.i_d2 = id2;
        try {
            auto [cca, cct] = eac::analyze(sc, p, cfg, true);
            if (!cca.err_1 || !cca.err_2 || !cca.err_3) {
                std::printf("%.2f  %.2f  FAIL %s | %s\n", ug2, id2, cca.error.c_str(),
                            cct.error.c_str());
                continue;
            }
            std::printf("%.2f  %.2f  %.4f  %.4f  %.4f  %.4f  %+6.2f  %+6.2f  %+6.2f  %.4f  %.4f  %+6.2f\n",
                        ug2, id2, *cca.oracle_phi_cr, *cca.phi_cr_1, *cca.phi_cr_2, *cca.phi_cr_3,
                        100 * *cca.err_1, 100 * *cca.err_2, 100 * *cca.err_3, *cct.oracle_t_cr,
                        cct.t_cr_3 ? *cct.t_cr_3 : -1.0, cct.err_3 ? 100 * *cct.err_3 : 0.0);
            s1 += std::abs(*cca.err_1);
            s2 += std::abs(*cca.err_2);
            s3 += std::abs(*cca.err_3);
            c3max = std::max(c3max, *cca.err_3);
            ++n;
        } catch (const std::exception& e) {
            std::printf("%.2f  %.2f  EXC %s\n", ug2, id2, e.what());
        }
    }
    if (n)
        std::printf("mean |e|: %.2f%% %.2f%% %.2f%%  max e3 %+.2f%%\n", 100 * s1 / n,
                    100 * s2 / n, 100 * s3 / n, 100 * c3max);
    return 0;
}
