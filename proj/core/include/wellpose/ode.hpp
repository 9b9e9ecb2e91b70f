#pragma once

// Dormand-Prince 8(5,3) explicit Runge-Kutta with the usual combined 5th/3rd order error estimate.
// Fixed-size real state; output is produced at prescribed times (steps are clipped to land on them).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "wellpose/error.hpp"

namespace wellpose::ode {

namespace dop853 {
inline constexpr double c2 = 0.05260015195876773187856;
inline constexpr double c3 = 0.07890022793815159781784;
inline constexpr double c4 = 0.11835034190722739672676;
inline constexpr double c5 = 0.28164965809277260327324;
inline constexpr double c6 = 0.33333333333333333333333;
inline constexpr double c7 = 0.25000000000000000000000;
inline constexpr double c8 = 0.30769230769230769230769;
inline constexpr double c9 = 0.65128205128205128205128;
inline constexpr double c10 = 0.60000000000000000000000;
inline constexpr double c11 = 0.85714285714285714285714;
inline constexpr double c12 = 1.00000000000000000000000;
inline constexpr double a21 = 0.05260015195876773187856;
inline constexpr double a31 = 0.01972505698453789945446;
inline constexpr double a32 = 0.05917517095361369836338;
inline constexpr double a41 = 0.02958758547680684918169;
inline constexpr double a43 = 0.08876275643042054754507;
inline constexpr double a51 = 0.24136513415926668550237;
inline constexpr double a53 = -0.88454947932828608534486;
inline constexpr double a54 = 0.92483400326179200311574;
inline constexpr double a61 = 0.03703703703703703703704;
inline constexpr double a64 = 0.17082860872947387127960;
inline constexpr double a65 = 0.12546768756682242501669;
inline constexpr double a71 = 0.03710937500000000000000;
inline constexpr double a74 = 0.17025221101954403931498;
inline constexpr double a75 = 0.06021653898045596068502;
inline constexpr double a76 = -0.01757812500000000000000;
inline constexpr double a81 = 0.03709200011850479271088;
inline constexpr double a84 = 0.17038392571223999381021;
inline constexpr double a85 = 0.10726203044637328465181;
inline constexpr double a86 = -0.01531943774862440175279;
inline constexpr double a87 = 0.00827378916381402288758;
inline constexpr double a91 = 0.62411095871607571711443;
inline constexpr double a94 = -3.36089262944694129406857;
inline constexpr double a95 = -0.86821934684172600681819;
inline constexpr double a96 = 27.5920996994467083049416;
inline constexpr double a97 = 20.1540675504778934086187;
inline constexpr double a98 = -43.4898841810699588477366;
inline constexpr double a101 = 0.47766253643826436589043;
inline constexpr double a104 = -2.48811461997166764192642;
inline constexpr double a105 = -0.59029082683684299637145;
inline constexpr double a106 = 21.2300514481811942347289;
inline constexpr double a107 = 15.2792336328824235832597;
inline constexpr double a108 = -33.2882109689848629194453;
inline constexpr double a109 = -0.02033120170850862613582;
inline constexpr double a111 = -0.93714243008598732571704;
inline constexpr double a114 = 5.18637242884406370830024;
inline constexpr double a115 = 1.09143734899672957818500;
inline constexpr double a116 = -8.14978701074692612513997;
inline constexpr double a117 = -18.5200656599969598641566;
inline constexpr double a118 = 22.7394870993505042818970;
inline constexpr double a119 = 2.49360555267965238987089;
inline constexpr double a1110 = -3.04676447189821950038237;
inline constexpr double a121 = 2.27331014751653820792360;
inline constexpr double a124 = -10.5344954667372501984067;
inline constexpr double a125 = -2.00087205822486249909676;
inline constexpr double a126 = -17.9589318631187989172766;
inline constexpr double a127 = 27.9488845294199600508500;
inline constexpr double a128 = -2.85899827713502369474066;
inline constexpr double a129 = -8.87285693353062954433549;
inline constexpr double a1210 = 12.3605671757943030647266;
inline constexpr double a1211 = 0.64339274601576353035597;
inline constexpr double b1 = 0.05429373411656876223805;
inline constexpr double b6 = 4.45031289275240888144114;
inline constexpr double b7 = 1.89151789931450038304282;
inline constexpr double b8 = -5.80120396001058478146721;
inline constexpr double b9 = 0.31116436695781989440892;
inline constexpr double b10 = -0.15216094966251607855618;
inline constexpr double b11 = 0.20136540080403034837478;
inline constexpr double b12 = 0.04471061572777259051769;
inline constexpr double bhh1 = 0.24409448818897637795276;
inline constexpr double bhh2 = 0.73384668828161185734136;
inline constexpr double bhh3 = 0.02205882352941176470588;
inline constexpr double er1 = 0.01312004499419488073250;
inline constexpr double er6 = -1.22515644637620444072057;
inline constexpr double er7 = -0.49575894965725019152141;
inline constexpr double er8 = 1.66437718245498653696153;
inline constexpr double er9 = -0.35032884874997368168865;
inline constexpr double er10 = 0.33417911871301747902973;
inline constexpr double er11 = 0.08192320648511571246571;
inline constexpr double er12 = -0.02235530786388629525884;
}  // namespace dop853

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  ///< 0 selects a step from the initial derivative
    long max_steps = 200'000'000;
};

struct Stats {
    long steps = 0;
    long rejected = 0;
    long evaluations = 0;
    double max_error = 0.0;  ///< largest normalized local error estimate of an accepted step
};

template <std::size_t N>
using State = std::array<double, N>;

/// Integrates y' = f(t, y) from t0 and calls on_sample(i, y) at each times[i] (ascending, >= t0).
/// Throws NumericalError with the reached time on step-size underflow or step budget exhaustion.
template <std::size_t N, class F, class S>
Stats integrate(F&& f, double t0, State<N> y, std::span<const double> times, S&& on_sample,
                const Options& opt = {})
{
    using namespace dop853;
    Stats stats;
    double t = t0;
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t) on_sample(next++, y);
    if (next == times.size()) return stats;

    auto norm = [&](const State<N>& v, const State<N>& scale) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += (v[i] / scale[i]) * (v[i] / scale[i]);
        return std::sqrt(s / N);
    };

    State<N> k1 = f(t, y), k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, yt, inc;
    ++stats.evaluations;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        State<N> sc;
        for (std::size_t i = 0; i < N; ++i) sc[i] = opt.atol + opt.rtol * std::abs(y[i]);
        const double d0 = norm(y, sc), d1 = norm(k1, sc);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, times.back() - t0);
    }
    h = std::min(h, opt.max_step);

    constexpr double tiny = std::numeric_limits<double>::epsilon();
    double prev_err = std::numeric_limits<double>::infinity();
    int bad = 0;

    while (next < times.size()) {
        const double target = times[next];
        bool clipped = false;
        double step = h;
        if (t + step >= target) {
            step = target - t;
            clipped = true;
        }
        if (!(step > 16.0 * tiny * std::max(1.0, std::abs(t))) && !clipped)
            throw NumericalError("ode: step size underflow", t);
        if (stats.steps + stats.rejected >= opt.max_steps) throw NumericalError("ode: step budget exhausted", t);

        auto stage = [&](State<N>& out, double c, auto... terms) {
            for (std::size_t i = 0; i < N; ++i) {
                double s = 0.0;
                ((s += terms.first * (*terms.second)[i]), ...);
                yt[i] = y[i] + step * s;
            }
            out = f(t + c * step, yt);
        };
        using P = std::pair<double, const State<N>*>;
        stage(k2, c2, P{a21, &k1});
        stage(k3, c3, P{a31, &k1}, P{a32, &k2});
        stage(k4, c4, P{a41, &k1}, P{a43, &k3});
        stage(k5, c5, P{a51, &k1}, P{a53, &k3}, P{a54, &k4});
        stage(k6, c6, P{a61, &k1}, P{a64, &k4}, P{a65, &k5});
        stage(k7, c7, P{a71, &k1}, P{a74, &k4}, P{a75, &k5}, P{a76, &k6});
        stage(k8, c8, P{a81, &k1}, P{a84, &k4}, P{a85, &k5}, P{a86, &k6}, P{a87, &k7});
        stage(k9, c9, P{a91, &k1}, P{a94, &k4}, P{a95, &k5}, P{a96, &k6}, P{a97, &k7}, P{a98, &k8});
        stage(k10, c10, P{a101, &k1}, P{a104, &k4}, P{a105, &k5}, P{a106, &k6}, P{a107, &k7},
              P{a108, &k8}, P{a109, &k9});
        stage(k11, c11, P{a111, &k1}, P{a114, &k4}, P{a115, &k5}, P{a116, &k6}, P{a117, &k7},
              P{a118, &k8}, P{a119, &k9}, P{a1110, &k10});
        stage(k12, c12, P{a121, &k1}, P{a124, &k4}, P{a125, &k5}, P{a126, &k6}, P{a127, &k7},
              P{a128, &k8}, P{a129, &k9}, P{a1210, &k10}, P{a1211, &k11});
        stats.evaluations += 11;

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            inc[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                     b11 * k11[i] + b12 * k12[i];
            yt[i] = y[i] + step * inc[i];
            const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yt[i]));
            const double e3 = (inc[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) / sk;
            const double e5 = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                               er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) / sk;
            err3 += e3 * e3;
            err5 += e5 * e5;
        }
        const double den = std::sqrt(static_cast<double>(N) * (err5 + 0.01 * err3));
        const double err = den == 0.0 ? 0.0 : err5 * std::abs(step) / den;
        if (!std::isfinite(err)) throw NumericalError("ode: non-finite error estimate", t);
        const double fac = std::sqrt(std::sqrt(std::sqrt(err)));

        if (err <= 1.0) {
            t = clipped ? target : t + step;
            y = yt;
            k1 = f(t, y);
            ++stats.evaluations;
            ++stats.steps;
            stats.max_error = std::max(stats.max_error, err);
            bad = 0;
            prev_err = std::numeric_limits<double>::infinity();
            const double grow = std::min(6.0, 0.9 / std::max(fac, 1e-30));
            // a short step clipped to an output time says nothing about the natural step length
            if (!clipped || step >= 0.5 * h) h = step * grow;
            h = std::min(h, opt.max_step);
            while (next < times.size() && times[next] <= t) on_sample(next++, y);
        } else {
            ++stats.rejected;
            if (err > 0.5 * prev_err && ++bad >= 2) {
                h = step * 0.333;
            } else {
                h = step * std::max(0.333, 0.9 / fac);
            }
            prev_err = err;
        }
    }
    return stats;
}

}  // namespace wellpose::ode
