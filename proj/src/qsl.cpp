#include "qslbattery/qsl.hpp"

#include <algorithm>
#include <cmath>

#include "qslbattery/threading.hpp"

namespace qbat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kGZeroTol = 1e-13;   // sample counts as an exact zero of G
constexpr double kAngleTol = 1e-12;   // "no evolution" threshold on angles
constexpr double kBoundSlack = 1e-9;  // tau' and tau_csl may exceed tau by this much only

double clamp_to_unit(double x, const char* what) {
    if (x < -1.0 - 1e-9 || x > 1.0 + 1e-9)
        throw DomainError(std::string(what) + " outside [-1, 1]: " + std::to_string(x));
    return std::clamp(x, -1.0, 1.0);
}

// squared Hilbert-Schmidt norm of ln rho with the eigenvalue floor
double log_norm_sq(const QubitState& rho, double floor) {
    const SpectralDecomposition dec = eig_hermitian(rho.rho());
    double s = 0.0;
    for (double l : dec.eigenvalues) {
        const double ll = std::log(std::max(l, floor));
        s += ll * ll;
    }
    return s;
}

double log_norm_sq_diag(double p0, double p1, double floor) {
    const double a = std::log(std::max(p0, floor));
    const double b = std::log(std::max(p1, floor));
    return a * a + b * b;
}

} // namespace

std::vector<double> cumulative_integral(const std::vector<double>& f, double h,
                                        QuadScheme scheme) {
    if (f.size() < 2) throw GridDegenerate("cumulative_integral: need at least 2 samples");
    const std::size_t n = f.size() - 1;
    std::vector<double> out(f.size(), 0.0);
    if (scheme == QuadScheme::Trapezoid) {
        for (std::size_t j = 0; j < n; ++j) out[j + 1] = out[j] + 0.5 * h * (f[j] + f[j + 1]);
        return out;
    }
    if (n < 2 || n % 2 != 0)
        throw GridDegenerate("cumulative_integral: Simpson needs an even subinterval count");
    for (std::size_t j = 0; j < n; ++j) {
        double inc;
        if (j % 2 == 0)
            inc = h * (5.0 * f[j] + 8.0 * f[j + 1] - f[j + 2]) / 12.0;
        else
            inc = h * (-f[j - 1] + 8.0 * f[j] + 5.0 * f[j + 1]) / 12.0;
        out[j + 1] = out[j] + inc;
    }
    return out;
}

QslSweep::QslSweep(const TrajectoryGrid& grid, QslOptions options)
    : grid_(&grid), options_(options) {
    const std::size_t npts = grid.size();
    if (npts < 3) throw GridDegenerate("QslSweep: trajectory has fewer than 3 samples");
    h_ = grid.dt();
    if (options_.quad.n != 0 && options_.quad.n != grid.subintervals())
        throw ConfigError("QslSweep: quadrature subinterval count must match the grid");
    if (options_.epsilon_floor <= 0.0)
        throw DomainError("QslSweep: eigenvalue floor must be positive");
    if (std::abs(std::log(options_.epsilon_floor)) > 1e3)
        throw FloorTooSmall("QslSweep: |ln floor| exceeds 1e3");

    sqrt_rho0_ = matrix_sqrt(grid.states[0].rho());
    const StateFunctionals f0 = state_functionals(grid.states[0]);
    c0_ = f0.rel_ent_coherence;
    tr_rho0_sq_ = f0.purity;
    const double cl1_0 = f0.l1_coherence;

    zeros_ = find_g_zeros(grid.params, grid.tmax());

    std::vector<double> norm_op(npts), norm_tr(npts), norm_hs(npts);
    std::vector<double> hs2(npts), hs2_d(npts), ln2(npts), ln2_d(npts), relp(npts);
    c_relent_.resize(npts);

    const RelPurityMode mode = options_.relpurity_mode;
    const double guard = options_.quad.singular_guard;

    for (std::size_t k = 0; k < npts; ++k) {
        const Matrix2& l = grid.lrho[k];
        const SchattenNorms norms = schatten_norms(l);
        norm_op[k] = norms.op;
        norm_tr[k] = norms.tr;
        norm_hs[k] = norms.hs;
        hs2[k] = norms.hs * norms.hs;
        const double ldiag = l(1, 1).real();  // dephased generator is diag(-x, x)
        hs2_d[k] = 2.0 * ldiag * ldiag;

        const QubitState& rho = grid.states[k];
        ln2[k] = log_norm_sq(rho, options_.epsilon_floor);
        ln2_d[k] = log_norm_sq_diag(rho.population_g(), rho.population_e(),
                                    options_.epsilon_floor);
        c_relent_[k] = state_functionals(rho).rel_ent_coherence;

        // relative-purity integrand
        const GSample& gs = grid.gsamples[k];
        bool skipped = std::abs(gs.g) <= kGZeroTol;
        if (!skipped && guard > 0.0) {
            for (double z : zeros_) {
                if (std::abs(gs.t - z) <= guard) {
                    skipped = true;
                    break;
                }
            }
        }
        switch (mode) {
        case RelPurityMode::Eq6Coherence:
            relp[k] = skipped ? 0.0 : cl1_0 * std::abs(gs.gdot / gs.g);
            break;
        case RelPurityMode::Eq6InitialCoherence:
            relp[k] = skipped ? 0.0 : cl1_0 * std::abs(gs.gdot / (gs.g * gs.g));
            break;
        case RelPurityMode::Eq4General:
            relp[k] = norms.hs;
            skipped = false;
            break;
        }
        if (skipped) ++n_skipped_;
    }

    const QuadScheme scheme = options_.quad.scheme;
    cum_op_ = cumulative_integral(norm_op, h_, scheme);
    cum_tr_ = cumulative_integral(norm_tr, h_, scheme);
    cum_hs_ = cumulative_integral(norm_hs, h_, scheme);
    cum_hs2_ = cumulative_integral(hs2, h_, scheme);
    cum_hs2_d_ = cumulative_integral(hs2_d, h_, scheme);
    cum_ln2_ = cumulative_integral(ln2, h_, scheme);
    cum_ln2_d_ = cumulative_integral(ln2_d, h_, scheme);
    cum_relp_ = cumulative_integral(relp, h_, scheme);
}

double QslSweep::skipped_fraction() const {
    return static_cast<double>(n_skipped_) / static_cast<double>(grid_->size());
}

bool QslSweep::singular_integrand_flagged() const { return skipped_fraction() > 1e-3; }

std::size_t QslSweep::index_of_tau(double tau) const {
    if (tau < 0.0) throw DomainError("tau must be nonnegative");
    const double tol = 1e-9 * std::max(1.0, grid_->tmax());
    if (tau > grid_->tmax() + tol)
        throw GridTooShort("tau = " + std::to_string(tau) + " exceeds the trajectory span");
    const auto k = static_cast<std::size_t>(std::llround(tau / h_));
    const std::size_t idx = std::min(k, grid_->size() - 1);
    if (std::abs(grid_->times[idx] - tau) > tol)
        throw DomainError("tau = " + std::to_string(tau) + " is not a grid point");
    return idx;
}

QslResult QslSweep::at(std::size_t index) const {
    if (index >= grid_->size()) throw GridTooShort("QslSweep::at: index past the grid end");

    QslResult r;
    r.tau = grid_->times[index];
    r.singular_integrand = singular_integrand_flagged();
    if (index == 0) return r;  // zero-time limits

    const double tau = r.tau;
    r.lambda_op = cum_op_[index] / tau;
    r.lambda_tr = cum_tr_[index] / tau;
    r.lambda_hs = cum_hs_[index] / tau;

    const QubitState& rho_t = grid_->states[index];
    const double fid = fidelity_with_sqrt(sqrt_rho0_, rho_t);
    r.bures_angle = (options_.bures_variant == BuresVariant::Standard)
                        ? std::acos(clamp_to_unit(std::sqrt(fid), "sqrt fidelity"))
                        : std::acos(clamp_to_unit(fid, "fidelity"));
    r.wy_angle = std::acos(clamp_to_unit(affinity_with_sqrt(sqrt_rho0_, rho_t), "affinity"));

    r.f_rel_purity =
        clamp_to_unit(trace_product_real(rho_t.rho(), grid_->states[0].rho()) / tr_rho0_sq_,
                      "relative purity");
    r.theta = std::acos(r.f_rel_purity);

    const bool no_generator = r.lambda_op == 0.0;
    r.stationary = no_generator;

    // geometric measures share max{1/Lambda} sin^2(angle); the operator norm
    // is the smallest of the three, so it realizes the max
    auto geometric = [&](double angle) {
        const double s = std::sin(angle);
        const double num = s * s;
        if (no_generator) {
            if (num <= kAngleTol) return 0.0;
            throw ZeroGenerator("QSL time undefined: state moved under a vanishing generator");
        }
        const double inv =
            std::max(1.0 / r.lambda_op, std::max(1.0 / r.lambda_tr, 1.0 / r.lambda_hs));
        return num * inv;
    };
    r.tau_qsl_fisher = geometric(r.bures_angle);
    r.tau_qsl_wy = geometric(r.wy_angle);

    // relative-purity bound
    {
        double num, den;
        if (options_.relpurity_mode == RelPurityMode::Eq4General) {
            num = 4.0 * r.theta * r.theta * tr_rho0_sq_;
            den = kPi * kPi * (cum_relp_[index] / tau);
        } else {
            num = 4.0 * std::sqrt(2.0) * r.theta * r.theta * tr_rho0_sq_;
            den = (kPi * kPi / tau) * cum_relp_[index];
        }
        if (den == 0.0) {
            if (r.theta <= kAngleTol) {
                r.tau_qsl_relpurity = 0.0;
                r.stationary = true;
            } else {
                throw ZeroGenerator("relative-purity bound undefined: vanishing denominator");
            }
        } else {
            r.tau_qsl_relpurity = num / den;
        }
        if (r.tau_qsl_relpurity > tau + kBoundSlack)
            throw NumericalDomain("relative-purity bound exceeded tau at tau = " +
                                  std::to_string(tau));
    }

    // coherence bound; every factor is the square root of a time average
    {
        r.lambda_rms = std::sqrt(std::max(cum_hs2_[index] / tau, 0.0));
        r.lambda_rms_d = std::sqrt(std::max(cum_hs2_d_[index] / tau, 0.0));
        r.lognorm_avg = std::sqrt(std::max(cum_ln2_[index] / tau, 0.0));
        r.lognorm_avg_d = std::sqrt(std::max(cum_ln2_d_[index] / tau, 0.0));
        const double num = std::abs(c_relent_[index] - c0_);
        const double den = r.lambda_rms_d * r.lognorm_avg_d + r.lambda_rms * r.lognorm_avg;
        if (den == 0.0) {
            if (num <= kAngleTol)
                r.tau_csl = 0.0;
            else
                throw ZeroGenerator("coherence bound undefined: vanishing denominator");
        } else {
            r.tau_csl = num / den;
        }
        if (r.tau_csl > tau + kBoundSlack)
            throw NumericalDomain("coherence bound exceeded tau at tau = " + std::to_string(tau));
    }
    return r;
}

std::vector<QslResult> QslSweep::all_serial() const {
    std::vector<QslResult> out(grid_->size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k);
    return out;
}

std::vector<QslResult> QslSweep::all() const {
    std::vector<QslResult> out(grid_->size());
    detail::parallel_index_map(out.size(), true, [&](std::size_t k) { out[k] = at(k); });
    return out;
}

std::array<double, 3> time_averaged_norms(const TrajectoryGrid& grid, double tau,
                                          const QuadratureSpec& quad) {
    if (!(tau > 0.0)) throw DomainError("time_averaged_norms: tau must be positive");
    QslOptions opt;
    opt.quad = quad;
    const QslSweep sweep(grid, opt);
    const QslResult r = sweep.at(sweep.index_of_tau(tau));
    return {r.lambda_op, r.lambda_tr, r.lambda_hs};
}

double bures_angle(const QubitState& rho0, const QubitState& rho_t, BuresVariant variant) {
    const double f = fidelity(rho0, rho_t);
    return (variant == BuresVariant::Standard)
               ? std::acos(clamp_to_unit(std::sqrt(f), "sqrt fidelity"))
               : std::acos(clamp_to_unit(f, "fidelity"));
}

RelPurity relative_purity(const TrajectoryGrid& grid, double tau) {
    if (tau < 0.0) throw DomainError("relative_purity: tau must be nonnegative");
    QslOptions opt;
    const QslSweep sweep(grid, opt);
    const QslResult r = sweep.at(sweep.index_of_tau(tau));
    return {r.f_rel_purity, r.theta};
}

namespace {

QslResult sweep_single(const TrajectoryGrid& grid, double tau, QslOptions opt) {
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    const QslSweep sweep(grid, opt);
    return sweep.at(sweep.index_of_tau(tau));
}

} // namespace

QslResult tau_qsl_fisher(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                         BuresVariant variant) {
    QslOptions opt;
    opt.quad = quad;
    opt.bures_variant = variant;
    return sweep_single(grid, tau, opt);
}

QslResult tau_qsl_wy(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad) {
    QslOptions opt;
    opt.quad = quad;
    return sweep_single(grid, tau, opt);
}

QslResult tau_qsl_relpurity(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                            RelPurityMode mode) {
    QslOptions opt;
    opt.quad = quad;
    opt.relpurity_mode = mode;
    return sweep_single(grid, tau, opt);
}

QslResult tau_csl(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                  double floor) {
    QslOptions opt;
    opt.quad = quad;
    opt.epsilon_floor = floor;
    return sweep_single(grid, tau, opt);
}

std::vector<Extremum> extrema_locator(const std::vector<double>& xs,
                                      const std::vector<double>& ys, double min_prominence) {
    if (xs.size() != ys.size()) throw GridDegenerate("extrema_locator: size mismatch");
    if (min_prominence < 0.0) throw DomainError("extrema_locator: negative prominence");
    std::vector<Extremum> found;
    if (xs.size() < 3) return found;

    struct Raw {
        std::size_t i;
        bool is_max;
    };
    std::vector<Raw> raw;
    for (std::size_t i = 1; i + 1 < ys.size(); ++i) {
        if (ys[i] > ys[i - 1] && ys[i] > ys[i + 1]) raw.push_back({i, true});
        else if (ys[i] < ys[i - 1] && ys[i] < ys[i + 1]) raw.push_back({i, false});
    }

    for (std::size_t j = 0; j < raw.size(); ++j) {
        const std::size_t i = raw[j].i;
        // reference levels: the neighboring opposite extrema, or the series ends
        const double left = (j == 0) ? ys.front() : ys[raw[j - 1].i];
        const double right = (j + 1 == raw.size()) ? ys.back() : ys[raw[j + 1].i];
        const double prom = std::min(std::abs(ys[i] - left), std::abs(ys[i] - right));
        if (prom < min_prominence) continue;

        const double denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
        double t = xs[i];
        if (denom != 0.0) {
            const double delta = 0.5 * (ys[i - 1] - ys[i + 1]) / denom;
            t += delta * (xs[i + 1] - xs[i]);
        }
        found.push_back({t, ys[i], raw[j].is_max, prom});
    }
    return found;
}

} // namespace qbat
