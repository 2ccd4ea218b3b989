// Acceptance suite: one pass/fail line per criterion, exit code = failures.
//
// Each criterion carries its tolerances inline; nothing is calibrated at run
// time. Criteria 8 and 9 are evaluated exactly as stated even where the
// stated tolerance is known to be unreachable for this model (the numbers
// are printed either way).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qslbattery/config.hpp"
#include "qslbattery/csv.hpp"
#include "qslbattery/dynamics.hpp"
#include "qslbattery/pipeline.hpp"
#include "qslbattery/qsl.hpp"
#include "qslbattery/thermo.hpp"

using namespace qbat;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

ModelParams nm_params() { return ModelParams{}; }

ModelParams mk_params() {
    ModelParams p;
    p.gamma0 = 0.1;
    return p;
}

QubitState random_state(std::mt19937& rng, double max_radius = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    double nx = g(rng), ny = g(rng), nz = g(rng);
    const double n = std::sqrt(nx * nx + ny * ny + nz * nz);
    const double r = max_radius * std::cbrt(u(rng));
    nx *= r / n;
    ny *= r / n;
    nz *= r / n;
    Matrix2 rho;
    rho(0, 0) = 0.5 * (1.0 + nz);
    rho(1, 1) = 0.5 * (1.0 - nz);
    rho(0, 1) = 0.5 * Complex(nx, -ny);
    rho(1, 0) = 0.5 * Complex(nx, ny);
    return QubitState::from_matrix(rho);
}

const std::vector<double>& column(const cli::CsvTable& t, const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        if (t.columns[c] == name) return t.data[c];
    throw Error("no column " + name);
}

// ---------------------------------------------------------------------------

void criterion_1_dynamics_fidelity() {
    bool pass = true;
    std::string detail;
    for (const ModelParams& p : {nm_params(), mk_params()}) {
        const std::vector<double> zeros = find_g_zeros(p, 3.0);
        const TrajectoryGrid rk = rk4_oracle(p, 3.0, 15000);  // 5000 steps per unit time
        double worst_global = 0.0, worst_smooth = 0.0, worst_trace = 0.0;
        double min_eig = 1.0;
        for (std::size_t k = 0; k < rk.size(); ++k) {
            const QubitState exact = propagate(p, rk.times[k]);
            const double diff = (rk.states[k].rho() - exact.rho()).max_abs();
            worst_global = std::max(worst_global, diff);
            bool near_zero = false;
            for (double z : zeros) near_zero = near_zero || std::abs(rk.times[k] - z) <= 0.01;
            if (!near_zero) worst_smooth = std::max(worst_smooth, diff);
            for (const QubitState* s : {&rk.states[k], &exact}) {
                worst_trace =
                    std::max(worst_trace, std::abs(s->rho().trace() - Complex(1.0, 0.0)));
                min_eig = std::min(min_eig, eig_hermitian(s->rho()).eigenvalues[1]);
            }
        }
        pass = pass && worst_global <= 1e-4 && worst_smooth <= 1e-6 && worst_trace <= 1e-12 &&
               min_eig >= -1e-12;
        detail += (p.gamma0 > 1.0 ? "strong: " : "weak: ") + std::string("|d|=") +
                  fmt(worst_global) + " (smooth " + fmt(worst_smooth) + "), trace " +
                  fmt(worst_trace) + ", min eig " + fmt(min_eig) + "; ";
    }
    report(1, "dynamics fidelity (map vs RK4 oracle)", pass, detail);
}

void criterion_2_regime_behavior() {
    const ModelParams nm = nm_params();
    const std::vector<double> zeros = find_g_zeros(nm, 3.0);
    const bool zero_ok = !zeros.empty() && std::abs(zeros[0] - 1.10776) <= 1e-4;

    bool nm_negative = false;
    for (double t = 1e-3; t <= 3.0; t += 1e-3) {
        try {
            nm_negative = nm_negative || rates(t, nm).gamma < 0.0;
        } catch (const RateSingular&) {
        }
    }

    const ModelParams mk = mk_params();
    bool mk_nonneg = true;
    for (double t = 1e-3; t <= 15.0; t += 1e-3) mk_nonneg = mk_nonneg && rates(t, mk).gamma >= 0.0;
    const bool mk_nozero = find_g_zeros(mk, 15.0).empty();

    ModelParams flat;
    flat.lambda = 100.0;
    flat.gamma0 = 0.1;
    double flat_dev = 0.0;
    for (double t = 0.1; t <= 10.0 + 1e-12; t += 1e-3)
        flat_dev = std::max(flat_dev, std::abs(rates(t, flat).gamma - flat.gamma0) / flat.gamma0);

    const bool pass = zero_ok && nm_negative && mk_nonneg && mk_nozero && flat_dev <= 0.02;
    report(2, "regime behavior", pass,
           "first zero " + (zeros.empty() ? std::string("none") : fmt(zeros[0])) +
               ", negative-rate interval " + (nm_negative ? "yes" : "NO") +
               ", weak preset nonnegative " + (mk_nonneg && mk_nozero ? "yes" : "NO") +
               ", flat-rate dev " + fmt(flat_dev));
}

void criterion_3_ergotropy_oracle() {
    const Hamiltonian2 h = Hamiltonian2::qubit(1.0);
    std::mt19937 rng(2024);
    const int steps = 60;
    const double pi = 3.141592653589793;
    double worst_gap = 0.0;
    bool grid_below_passive = false;

    for (int trial = 0; trial < 100; ++trial) {
        const QubitState rho = random_state(rng);
        const double e_passive = trace_product_real(passive_state(rho, h).rho(), h.matrix);
        const Matrix2& r = rho.rho();
        double best = 1e300;
#ifdef _OPENMP
#pragma omp parallel for reduction(min : best) schedule(static)
#endif
        for (int ia = 0; ia < steps; ++ia) {
            const double alpha = 2.0 * pi * ia / steps;
            for (int ib = 0; ib < steps; ++ib) {
                const double beta = pi * ib / (steps - 1);
                const double cb = std::cos(0.5 * beta), sb = std::sin(0.5 * beta);
                for (int ic = 0; ic < steps; ++ic) {
                    const double gam = 2.0 * pi * ic / steps;
                    // excited row of U = Rz(alpha) Ry(beta) Rz(gamma)
                    const Complex za(std::cos(0.5 * alpha), std::sin(0.5 * alpha));
                    const Complex zc(std::cos(0.5 * gam), std::sin(0.5 * gam));
                    const Complex u0 = za * sb * std::conj(zc);  // <e|U|g>
                    const Complex u1 = za * cb * zc;             // <e|U|e>
                    const double e_exc =
                        (std::conj(u0) * (r(0, 0) * u0 + r(0, 1) * u1) +
                         std::conj(u1) * (r(1, 0) * u0 + r(1, 1) * u1))
                            .real();
                    best = std::min(best, e_exc);  // H = diag(0, 1)
                }
            }
        }
        if (best < e_passive - 1e-12) grid_below_passive = true;
        worst_gap = std::max(worst_gap, best - e_passive);
    }

    const ErgotropyBreakdown b =
        ergotropy_breakdown(QubitState::from_amplitudes(0.5 * std::sqrt(3.0), 0.5), h, 1.0);
    const bool w0_ok = std::abs(b.w - 0.25) <= 1e-12;

    const bool pass = !grid_below_passive && worst_gap <= 1e-3 && w0_ok;
    report(3, "ergotropy against the brute-force unitary grid", pass,
           "worst grid-passive gap " + fmt(worst_gap) + ", W(rho_0) = " + fmt(b.w));
}

void criterion_4_split_consistency() {
    const Hamiltonian2 h = Hamiltonian2::qubit(1.0);
    std::mt19937 rng(77);
    double worst_sum = 0.0, worst_minus = 0.0, worst_eq16 = 0.0;

    for (int trial = 0; trial < 1000; ++trial) {
        const QubitState rho = random_state(rng);
        const ErgotropyBreakdown b = ergotropy_breakdown(rho, h, 1.0);
        worst_sum = std::max(worst_sum, std::abs(b.w - (b.w_i + b.w_c)));
        if (rho.population_e() <= 0.5)
            worst_minus = std::max(worst_minus, std::abs(b.w_c - b.w_c_eq18_minus));
    }
    for (int trial = 0; trial < 1000; ++trial) {
        const QubitState rho = random_state(rng, 0.999);
        const ErgotropyBreakdown b = ergotropy_breakdown(rho, h, 1.0);
        worst_eq16 = std::max(worst_eq16, std::abs(b.w_c - b.w_c_eq16));
    }
    // every trajectory state keeps rho_ee <= 1/4, so the minus form applies there too
    const TrajectoryGrid grid = build_trajectory(nm_params(), 3.0, 3000);
    for (const QubitState& s : grid.states) {
        const ErgotropyBreakdown b = ergotropy_breakdown(s, h, 1.0);
        worst_sum = std::max(worst_sum, std::abs(b.w - (b.w_i + b.w_c)));
        worst_minus = std::max(worst_minus, std::abs(b.w_c - b.w_c_eq18_minus));
    }

    const bool pass = worst_sum <= 1e-10 && worst_minus <= 1e-9 && worst_eq16 <= 1e-8;
    report(4, "ergotropy split consistency", pass,
           "|w-(w_i+w_c)| " + fmt(worst_sum) + ", |w_c - closed form(-)| " + fmt(worst_minus) +
               ", relative-entropy identity " + fmt(worst_eq16));
}

void criterion_5_battery_cycle() {
    const ModelParams nm = nm_params();
    const Hamiltonian2 h = Hamiltonian2::qubit(nm.omega0);
    const double tstar = find_g_zeros(nm, 3.0).at(0);

    const double w_at_zero = ergotropy(propagate(nm, tstar), h);

    cli::RunConfig cfg;
    const cli::SweepOutput sweep = cli::run_sweep(cfg);
    const auto& t = column(sweep.table, "t");
    const auto& w = column(sweep.table, "w");
    const auto& p = column(sweep.table, "p_inst");
    const double hstep = t[1] - t[0];

    double revival = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] > tstar && t[k] <= tstar + 1.0) revival = std::max(revival, w[k]);

    bool discharge_negative = true, recharge_positive = true;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= hstep && t[k] <= tstar - hstep) discharge_negative &= p[k] < 0.0;
        if (t[k] > tstar + hstep && t[k] <= tstar + 0.1) recharge_positive &= p[k] > 0.0;
    }

    cli::RunConfig mcfg;
    mcfg.model.gamma0 = 0.1;
    mcfg.tmax = 15.0;
    mcfg.samples = 15000;
    mcfg.quad.n = mcfg.samples;
    const cli::SweepOutput msweep = cli::run_sweep(mcfg);
    const auto& mw = column(msweep.table, "w");
    const auto& mfisher = column(msweep.table, "tau_qsl_fisher");
    bool w_decreasing = true, fisher_nondecreasing = true;
    for (std::size_t k = 1; k < mw.size(); ++k) {
        w_decreasing &= mw[k] < mw[k - 1];
        fisher_nondecreasing &= mfisher[k] >= mfisher[k - 1] - 1e-12;
    }

    const bool pass = w_at_zero <= 1e-9 && revival > 0.01 && discharge_negative &&
                      recharge_positive && w_decreasing && fisher_nondecreasing;
    report(5, "battery cycle phenomenology", pass,
           "w(t*) " + fmt(w_at_zero) + ", revival " + fmt(revival) + ", discharge p<0 " +
               (discharge_negative ? "yes" : "NO") + ", recharge p>0 " +
               (recharge_positive ? "yes" : "NO") + ", weak preset w monotone " +
               (w_decreasing ? "yes" : "NO") + ", fisher non-decreasing " +
               (fisher_nondecreasing ? "yes" : "NO"));
}

void criterion_6_bound_validity() {
    bool pass = true;
    double worst = -1e300;
    for (const ModelParams& p : {nm_params(), mk_params()}) {
        const TrajectoryGrid grid = build_trajectory(p, 3.0, 3000);
        for (const RelPurityMode mode :
             {RelPurityMode::Eq6Coherence, RelPurityMode::Eq4General}) {
            QslOptions opt;
            opt.relpurity_mode = mode;
            const QslSweep sweep(grid, opt);
            for (const QslResult& r : sweep.all()) {
                if (r.tau == 0.0) continue;
                worst = std::max(worst, std::max(r.tau_qsl_relpurity, r.tau_csl) - r.tau);
                pass = pass && r.tau_qsl_relpurity <= r.tau + 1e-9 && r.tau_csl <= r.tau + 1e-9;
            }
        }
    }
    report(6, "bound validity (tau' and tau_csl never exceed tau)", pass,
           "worst (bound - tau) = " + fmt(worst));
}

void criterion_7_metric_comparison() {
    const TrajectoryGrid grid = build_trajectory(nm_params(), 3.0, 3000);
    QslOptions opt;  // default: standard angle
    const QslSweep sweep(grid, opt);
    bool dominated = true;
    double margin = 1e300;
    for (const QslResult& r : sweep.all()) {
        if (r.tau == 0.0) continue;
        dominated = dominated && r.tau_qsl_wy >= r.tau_qsl_fisher - 1e-12;
        margin = std::min(margin, r.tau_qsl_wy - r.tau_qsl_fisher);
    }

    // the as-printed variant is recorded, not asserted
    QslOptions printed;
    printed.bures_variant = BuresVariant::AsPrinted;
    const QslSweep psweep(grid, printed);
    std::size_t violations = 0;
    for (const QslResult& r : psweep.all())
        if (r.tau > 0.0 && r.tau_qsl_wy < r.tau_qsl_fisher - 1e-12) ++violations;

    report(7, "metric comparison (affinity bound dominates)", dominated,
           "min margin " + fmt(margin) + "; as-printed variant: " + std::to_string(violations) +
               " dominance violations (recorded only)");
}

struct ExtremaCheck {
    bool pass = true;
    std::string detail;
};

ExtremaCheck check_alignment(const std::vector<double>& ts, const std::vector<double>& probe,
                             const std::vector<double>& partner, bool same_kind,
                             double max_steps, double h) {
    const auto window = [&](const std::vector<double>& ys) {
        std::vector<double> xs_w, ys_w;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] >= 0.2 && ts[k] <= 3.0) {
                xs_w.push_back(ts[k]);
                ys_w.push_back(ys[k]);
            }
        }
        return std::make_pair(xs_w, ys_w);
    };
    const auto [xs_p, ys_p] = window(probe);
    const auto [xs_q, ys_q] = window(partner);
    const auto range = [](const std::vector<double>& ys) {
        const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
        return *hi - *lo;
    };
    const auto ext_probe = extrema_locator(xs_p, ys_p, 0.05 * range(ys_p));
    const auto ext_partner = extrema_locator(xs_q, ys_q, 0.05 * range(ys_q));
    const auto rows = cli::align_extrema(ext_probe, ext_partner, same_kind, h, max_steps);

    ExtremaCheck out;
    for (const cli::AlignmentRow& r : rows) {
        out.pass = out.pass && r.matched;
        out.detail += std::string(r.is_max ? "max@" : "min@") + fmt(r.t) + "->" +
                      (r.partner_is_max ? "max@" : "min@") + fmt(r.partner_t) + " (" +
                      fmt(r.distance_in_steps) + " steps" +
                      (r.matched ? "" : ", UNMATCHED") + ") ";
    }
    if (rows.empty()) {
        out.pass = false;
        out.detail = "no extrema found ";
    }
    return out;
}

void criterion_8_extrema_alignment() {
    cli::RunConfig cfg;
    const cli::SweepOutput sweep = cli::run_sweep(cfg);
    const auto& t = column(sweep.table, "t");
    const double h = t[1] - t[0];

    const ExtremaCheck csl = check_alignment(t, column(sweep.table, "tau_csl"),
                                             column(sweep.table, "w_c"), true, 1.0, h);
    const ExtremaCheck relp = check_alignment(t, column(sweep.table, "tau_qsl_relpurity"),
                                              column(sweep.table, "p_inst"), false, 2.0, h);
    report(8, "extrema alignment (coherence bound vs W_c; purity bound vs power)",
           csl.pass && relp.pass, "tau_csl: " + csl.detail + "| tau': " + relp.detail);
}

void criterion_9_numerical_hygiene() {
    // Refinement stability applies on smooth stretches: tau whose whole
    // integration range [0, tau] avoids integrand singularities. The norm
    // integrands behind the geometric bounds qualify everywhere away from
    // the zeros of G; the coherence-mode tau' integrand is singular at each
    // zero (values past the first zero are grid-documented by design); the
    // ln-norm integrand behind tau_csl is singular at t = 0 for a pure start,
    // so no tau qualifies and its measured drift is reported informationally.
    const ModelParams nm = nm_params();
    const std::vector<double> zeros = find_g_zeros(nm, 3.0);
    const TrajectoryGrid coarse = build_trajectory(nm, 3.0, 3000);
    const TrajectoryGrid fine = build_trajectory(nm, 3.0, 6000);
    QslOptions opt;
    const QslSweep sa(coarse, opt);
    const QslSweep sb(fine, opt);
    QslOptions gen;
    gen.relpurity_mode = RelPurityMode::Eq4General;
    const QslSweep ga(coarse, gen);
    const QslSweep gb(fine, gen);

    const auto rel = [](double x, double y) {
        return std::abs(x - y) / std::max(std::abs(y), 1e-12);
    };
    double worst[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 200; k <= 3000; ++k) {
        const double tau = coarse.times[k];
        bool away_from_zero = true;
        for (double z : zeros) away_from_zero = away_from_zero && std::abs(tau - z) >= 0.05;
        if (!away_from_zero) continue;
        const QslResult a = sa.at(k);
        const QslResult b = sb.at(2 * k);
        worst[0] = std::max(worst[0], rel(a.tau_qsl_fisher, b.tau_qsl_fisher));
        worst[1] = std::max(worst[1], rel(a.tau_qsl_wy, b.tau_qsl_wy));
        if (tau <= zeros.front() - 0.05)  // smooth integration range for the eq6 integrand
            worst[2] = std::max(worst[2], rel(a.tau_qsl_relpurity, b.tau_qsl_relpurity));
        worst[3] = std::max(worst[3], rel(a.tau_csl, b.tau_csl));  // informational
        worst[4] = std::max(worst[4], rel(ga.at(k).tau_qsl_relpurity,
                                          gb.at(2 * k).tau_qsl_relpurity));
    }
    const bool quad_ok =
        worst[0] <= 1e-6 && worst[1] <= 1e-6 && worst[2] <= 1e-6 && worst[4] <= 1e-6;

    // central-difference power against the exact dW/dt, O(h^2) ratio test at t = 0.5
    const Hamiltonian2 ham = Hamiltonian2::qubit(nm.omega0);
    const auto exact_dw = [&](double t) {
        const GSample s = g_function(t, nm);
        const double q0 = nm.excited_population0();
        const double c0 = std::norm(nm.coherence_eg0());
        const double q = s.g * s.g * q0;
        const double qdot = 2.0 * s.g * s.gdot * q0;
        const double c2 = s.g * s.g * c0;
        const double c2dot = 2.0 * s.g * s.gdot * c0;
        const double rad = std::sqrt((0.5 - q) * (0.5 - q) + c2);
        return nm.omega0 * (qdot + (-(0.5 - q) * qdot + 0.5 * c2dot) / rad);
    };
    const auto diff_err = [&](double h) {
        const double t0 = 0.5;
        const double wp = ergotropy(propagate(nm, t0 + h), ham);
        const double wm = ergotropy(propagate(nm, t0 - h), ham);
        return std::abs((wp - wm) / (2.0 * h) - exact_dw(t0));
    };
    const double e1 = diff_err(1e-3);
    const double e2 = diff_err(5e-4);
    const double ratio = e1 / e2;
    const bool power_ok = ratio >= 3.5 && ratio <= 4.5;

    report(9, "numerical hygiene (quadrature refinement, difference order)", quad_ok && power_ok,
           "rel change fisher " + fmt(worst[0]) + ", wy " + fmt(worst[1]) + ", tau'(eq6, smooth) " +
               fmt(worst[2]) + ", tau'(eq4) " + fmt(worst[4]) + ", tau_csl (no smooth stretch; informational) " +
               fmt(worst[3]) + "; power error ratio " + fmt(ratio));
}

void criterion_10_determinism() {
    cli::RunConfig cfg;
    cfg.samples = 1000;
    cfg.quad.n = 1000;
    const std::string ra = cli::render_csv(cli::select_columns(cli::run_sweep(cfg).table,
                                                               cfg.columns));
    const std::string rb = cli::render_csv(cli::select_columns(cli::run_sweep(cfg).table,
                                                               cfg.columns));
    report(10, "determinism (byte-identical repeated runs)", ra == rb,
           ra == rb ? std::to_string(ra.size()) + " bytes identical" : "outputs differ");
}

} // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    criterion_1_dynamics_fidelity();
    criterion_2_regime_behavior();
    criterion_3_ergotropy_oracle();
    criterion_4_split_consistency();
    criterion_5_battery_cycle();
    criterion_6_bound_validity();
    criterion_7_metric_comparison();
    criterion_8_extrema_alignment();
    criterion_9_numerical_hygiene();
    criterion_10_determinism();
    std::printf("----------------\n%d of 10 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
