// Timing comparison between the OpenMP kernels and their serial reference
// implementations, on a grid large enough for the parallel maps to matter.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "qslbattery/dynamics.hpp"
#include "qslbattery/qsl.hpp"
#include "qslbattery/thermo.hpp"
#include "qslbattery/threading.hpp"

using namespace qbat;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-24s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "bitwise equal" : "MISMATCH");
}

bool same_states(const TrajectoryGrid& a, const TrajectoryGrid& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (int i = 0; i < 4; ++i) {
            if (a.states[k].rho().m[static_cast<std::size_t>(i)] !=
                b.states[k].rho().m[static_cast<std::size_t>(i)])
                return false;
        }
    }
    return true;
}

} // namespace

int main() {
    const ModelParams params;  // strongly coupled preset
    const std::size_t n = 200000;
    const double tmax = 3.0;

    std::printf("workers: %d   grid: %zu points\n\n", worker_count(), n + 1);
    std::printf("%-24s %13s %13s %7s\n", "kernel", "serial", "parallel", "speedup");

    TrajectoryGrid grid_s, grid_p;
    const double t1s = time_ms([&] { grid_s = build_trajectory_serial(params, tmax, n); });
    const double t1p = time_ms([&] { grid_p = build_trajectory(params, tmax, n); });
    row("build_trajectory", t1s, t1p, same_states(grid_s, grid_p));

    const Hamiltonian2 h = Hamiltonian2::qubit(params.omega0);
    std::vector<ThermoSample> th_s, th_p;
    const double t2s = time_ms([&] { th_s = thermo_series_serial(grid_p, h, params.temperature); });
    const double t2p = time_ms([&] { th_p = thermo_series(grid_p, h, params.temperature); });
    bool th_same = th_s.size() == th_p.size();
    for (std::size_t k = 0; th_same && k < th_s.size(); ++k)
        th_same = th_s[k].w == th_p[k].w && th_s[k].c_relent == th_p[k].c_relent;
    row("thermo_series", t2s, t2p, th_same);

    QslOptions opt;
    const QslSweep sweep(grid_p, opt);
    std::vector<QslResult> q_s, q_p;
    const double t3s = time_ms([&] { q_s = sweep.all_serial(); });
    const double t3p = time_ms([&] { q_p = sweep.all(); });
    bool q_same = q_s.size() == q_p.size();
    for (std::size_t k = 0; q_same && k < q_s.size(); ++k)
        q_same = q_s[k].tau_qsl_fisher == q_p[k].tau_qsl_fisher &&
                 q_s[k].tau_csl == q_p[k].tau_csl;
    row("qsl_sweep", t3s, t3p, q_same);

    return 0;
}
