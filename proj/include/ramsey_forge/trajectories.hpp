#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ramsey_forge/config.hpp"

namespace ramsey_forge {

/**
 * Constants of the tracking argument for one (n, eps). n is a real number
 * so that asymptotic checks can run at a symbolic size.
 */
struct TrajectoryParams {
    double n = 1e6;
    double epsilon = 0.1;
    double s = 0.0;
    double delta = 0.0;
    double kappa = 0.0;
    double omega = 0.0;
    double t_max = 0.0;
    /// When false, error functions accept any t in [0, 1/6).
    bool enforce_t_max = true;

    static TrajectoryParams make(double n, double epsilon) {
        if (!(n > 1.0)) throw std::invalid_argument("n must exceed 1");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
        TrajectoryParams p;
        p.n = n;
        p.epsilon = epsilon;
        p.s = special_probability(epsilon);
        const double w = p.s * std::pow(1.0 - p.s, 4);
        p.delta = 1e-7 * w;
        p.kappa = 1e4 / w;
        p.omega = 100.0 * (p.kappa + 1.0) * p.delta;
        p.t_max = -std::expm1(-p.delta * std::log(n)) / 6.0;
        return p;
    }

    double i_max() const { return t_max * n * n; }
};

inline double p_of(double t) {
    if (!(t >= 0.0 && t <= 1.0 / 6.0)) throw std::domain_error("t outside [0, 1/6]");
    return 1.0 - 6.0 * t;
}

inline double r_of(double t, double s) {
    if (!(t >= 0.0 && t <= 1.0 / 6.0)) throw std::domain_error("t outside [0, 1/6]");
    return std::exp(-(7776.0 / 25.0) * (1.0 - s) * (1.0 - s) * t * t * t);
}

enum class Trajectory { q, y, a, b, c1, c2, c, d, e, f, z0, z1, z2 };

inline constexpr std::array<Trajectory, 13> kAllTrajectories{
    Trajectory::q,  Trajectory::y, Trajectory::a, Trajectory::b,  Trajectory::c1, Trajectory::c2, Trajectory::c,
    Trajectory::d,  Trajectory::e, Trajectory::f, Trajectory::z0, Trajectory::z1, Trajectory::z2};

inline std::string to_string(Trajectory id) {
    static constexpr std::array<std::string_view, 13> names{"q", "y",  "a", "b", "c1", "c2", "c",
                                                            "d", "e",  "f", "z0", "z1", "z2"};
    return std::string(names[static_cast<std::size_t>(id)]);
}

inline Trajectory parse_trajectory(std::string_view name) {
    for (Trajectory id : kAllTrajectories)
        if (to_string(id) == name) return id;
    throw std::invalid_argument("unknown trajectory '" + std::string(name) + "'");
}

/// Exponent of n in the unscaled prediction n^power * traj(t).
inline int power(Trajectory id) {
    switch (id) {
        case Trajectory::q: return 3;
        case Trajectory::y: return 1;
        case Trajectory::a:
        case Trajectory::b:
        case Trajectory::c: return 2;
        case Trajectory::c1:
        case Trajectory::c2: return 1;
        case Trajectory::d:
        case Trajectory::e:
        case Trajectory::f:
        case Trajectory::z0: return 3;
        case Trajectory::z1: return 2;
        case Trajectory::z2: return 1;
    }
    throw std::invalid_argument("unknown trajectory");
}

inline double traj(Trajectory id, double t, double s) {
    const double p = p_of(t);
    const double r = r_of(t, s);
    const double u = 1.0 - s;
    switch (id) {
        case Trajectory::q: return p * p * p / 6.0;
        case Trajectory::y: return p * p;
        case Trajectory::a:
        case Trajectory::b: return 5.0 / 6.0 * s * u * u * std::pow(p, 5) * r * r;
        case Trajectory::c1: return 5.0 / 6.0 * s * u * p * p * r;
        case Trajectory::c2: return 5.0 / 6.0 * u * u * p * p * p * r * r;
        case Trajectory::c: return traj(Trajectory::c1, t, s) * traj(Trajectory::c2, t, s);
        case Trajectory::d:
        case Trajectory::e:
        case Trajectory::f: return 5.0 / 6.0 * s * u * u * u * std::pow(p, 7) * r * r * r;
        case Trajectory::z0: return 5.0 / 6.0 * std::pow(u, 5) * std::pow(p, 9) * r * r * r;
        case Trajectory::z1: return std::pow(u, 4) * (1.0 - p) * std::pow(p, 6) * r * r;
        case Trajectory::z2: return 6.0 / 5.0 * u * u * u * (1.0 - p) * (1.0 - p) * p * p * p * r;
    }
    throw std::invalid_argument("unknown trajectory");
}

/// Right-hand side of the ODE system for a, c1, c2, d, z0, z1, z2.
inline double ode_rhs(Trajectory id, double t, double s) {
    const double q = traj(Trajectory::q, t, s), y = traj(Trajectory::y, t, s);
    const double a = traj(Trajectory::a, t, s), c = traj(Trajectory::c, t, s);
    const double c1 = traj(Trajectory::c1, t, s), c2 = traj(Trajectory::c2, t, s);
    const double d = traj(Trajectory::d, t, s);
    const double z0 = traj(Trajectory::z0, t, s), z1 = traj(Trajectory::z1, t, s), z2 = traj(Trajectory::z2, t, s);
    const double qc = q * c;
    switch (id) {
        case Trajectory::a: return -5.0 * a * d / (2.0 * qc) - 6.0 * a * a * z2 / qc - 2.0 * a * y / q;
        case Trajectory::c1: return -5.0 * d * c1 / (3.0 * qc) - 3.0 * a * z2 * c1 / qc;
        case Trajectory::c2: return -5.0 * d * c2 / (2.0 * qc) - 6.0 * a * z2 * c2 / qc;
        case Trajectory::d: return -20.0 * d * d / (6.0 * qc) - 9.0 * a * z2 * d / qc - 3.0 * y * d / q;
        case Trajectory::z0: return -5.0 * d * z0 / qc - 9.0 * a * z2 * z0 / qc - 3.0 * y * z0 / q;
        case Trajectory::z1:
            return a * z0 / qc - 10.0 * d * z1 / (3.0 * qc) - 6.0 * a * z2 * z1 / qc - 2.0 * y * z1 / q;
        case Trajectory::z2: return 2.0 * a * z1 / qc - 5.0 * d * z2 / (3.0 * qc) - 3.0 * a * z2 * z2 / qc - y * z2 / q;
        default: throw std::invalid_argument("no differential equation for " + to_string(id));
    }
}

inline constexpr std::array<Trajectory, 7> kOdeTrajectories{Trajectory::a,  Trajectory::c1, Trajectory::c2,
                                                            Trajectory::d,  Trajectory::z0, Trajectory::z1,
                                                            Trajectory::z2};

/// |central difference of traj - ode_rhs| at t.
inline double ode_residual(Trajectory id, double t, double s, double h = 1e-5) {
    if (!(h > 0.0) || t - h < 0.0 || t + h > 1.0 / 6.0) throw std::domain_error("t +- h outside [0, 1/6]");
    const double derivative = (traj(id, t + h, s) - traj(id, t - h, s)) / (2.0 * h);
    return std::abs(derivative - ode_rhs(id, t, s));
}

enum class ErrorFn { g_y, g_q, g_ab, g_c1, g_c2, g_def, g_0, g_1, g_2, g_c };

inline constexpr std::array<ErrorFn, 10> kAllErrorFns{ErrorFn::g_y,   ErrorFn::g_q, ErrorFn::g_ab, ErrorFn::g_c1,
                                                      ErrorFn::g_c2,  ErrorFn::g_def, ErrorFn::g_0, ErrorFn::g_1,
                                                      ErrorFn::g_2,   ErrorFn::g_c};

inline std::string to_string(ErrorFn id) {
    static constexpr std::array<std::string_view, 10> names{"g_y",   "g_q", "g_ab", "g_c1", "g_c2",
                                                            "g_def", "g_0", "g_1",  "g_2",  "g_c"};
    return std::string(names[static_cast<std::size_t>(id)]);
}

namespace detail {

inline double checked_p(double t, const TrajectoryParams& params) {
    if (params.enforce_t_max && t > params.t_max * (1.0 + 1e-12))
        throw std::domain_error("t beyond t_max");
    const double p = p_of(t);
    if (!(p > 0.0)) throw std::domain_error("error functions need p > 0");
    return p;
}

/// Exponent h in n^-omega p^-h for the window-type error functions.
inline double window_exponent(ErrorFn id, double kappa) {
    switch (id) {
        case ErrorFn::g_ab: return 100.0 * kappa;
        case ErrorFn::g_c1: return 100.0 * kappa + 2.0;
        case ErrorFn::g_c2: return 100.0 * kappa + 1.0;
        case ErrorFn::g_def: return 100.0 * kappa - 3.0;
        case ErrorFn::g_0: return 100.0 * kappa - 5.0;
        case ErrorFn::g_1: return 100.0 * kappa - 1.0;
        case ErrorFn::g_2: return 100.0 * kappa + 1.0;
        default: throw std::invalid_argument("not a window error function");
    }
}

}  // namespace detail

/// Natural log of the error function; finite where the linear value overflows.
inline double log_err(ErrorFn id, double t, const TrajectoryParams& params) {
    const double p = detail::checked_p(t, params);
    const double log_n = std::log(params.n);
    switch (id) {
        case ErrorFn::g_y: return (-0.5 + params.delta) * log_n;
        case ErrorFn::g_q: return (-1.0 + 2.0 * params.delta) * log_n;
        case ErrorFn::g_c: {
            const double c1 = traj(Trajectory::c1, t, params.s), c2 = traj(Trajectory::c2, t, params.s);
            return -params.omega * log_n - 100.0 * params.kappa * std::log(p) +
                   std::log(2.0 * (c2 / (p * p) + c1 / p));
        }
        default: return -params.omega * log_n - detail::window_exponent(id, params.kappa) * std::log(p);
    }
}

inline double err(ErrorFn id, double t, const TrajectoryParams& params) { return std::exp(log_err(id, t, params)); }

/// Order of the supersolution inequalities and their multipliers.
enum class Slack { ab, c1, c2, def, z0, z1, z2 };

inline constexpr std::array<std::string_view, 7> kSlackNames{"ab", "c1", "c2", "def", "0", "1", "2"};

/**
 * Slack of each supersolution inequality at t. Every slack equals
 * exp(log_scale) * bracket[i] with log_scale = log(n^-omega p^-100kappa), so
 * its sign is the sign of the bracket. `closed_form` holds the simplified
 * brackets obtained with g_c <= 4 n^-omega p^(-100kappa+1).
 */
struct SupersolutionSlacks {
    double t = 0.0;
    double p = 1.0;
    double log_scale = 0.0;
    std::array<double, 7> bracket{};
    std::array<double, 7> closed_form{};

    double value(std::size_t i) const { return std::exp(log_scale) * bracket[i]; }
    bool all_positive() const {
        for (double b : bracket)
            if (!(b > 0.0)) return false;
        return true;
    }
};

inline SupersolutionSlacks check_supersolution(double t, const TrajectoryParams& params) {
    const double p = detail::checked_p(t, params);
    const double k = params.kappa;
    const double c1 = traj(Trajectory::c1, t, params.s), c2 = traj(Trajectory::c2, t, params.s);
    // error functions and their derivatives in units of n^-omega p^-100kappa
    const double ab = 1.0, def = p * p * p, g2 = 1.0 / p, gc = 2.0 * (c2 / (p * p) + c1 / p);
    // derivative of n^-omega p^-(100kappa + h), same units
    auto deriv = [&](double h_offset) { return 6.0 * (100.0 * k + h_offset) * std::pow(p, -h_offset - 1.0); };

    SupersolutionSlacks out;
    out.t = t;
    out.p = p;
    out.log_scale = -params.omega * std::log(params.n) - 100.0 * k * std::log(p);
    const double pm1 = 1.0 / p;
    out.bracket = {
        deriv(0.0) - 30.0 * k * (p * p * g2 + pm1 * ab + pm1 * gc),
        deriv(2.0) - 30.0 * k * (pm1 * g2 + std::pow(p, -3) * ab + std::pow(p, -4) * gc + std::pow(p, -6) * def),
        deriv(1.0) - 30.0 * k * (pm1 * g2 + std::pow(p, -2) * ab + std::pow(p, -3) * gc + std::pow(p, -5) * def),
        deriv(-3.0) - 30.0 * k * (std::pow(p, 4) * g2 + pm1 * def + p * p * ab + p * gc),
        deriv(-5.0) - 30.0 * k * (std::pow(p, 6) * g2 + p * def + std::pow(p, 4) * ab + std::pow(p, 3) * gc),
        deriv(-1.0) - 40.0 * k * (std::pow(p, 3) * g2 + std::pow(p, -2) * def + p * ab + pm1 * gc),
        deriv(1.0) - 40.0 * k * (pm1 * g2 + std::pow(p, -5) * def + std::pow(p, -2) * ab + std::pow(p, -3) * gc),
    };
    out.closed_form = {
        k * (570.0 * pm1 - 30.0 * p - 120.0),
        (420.0 * k + 12.0) * std::pow(p, -3) - 30.0 * k * std::pow(p, -2),
        (390.0 * k + 6.0) * std::pow(p, -2),
        (420.0 * k - 18.0) * p * p - 30.0 * k * p * p * p,
        (420.0 * k - 30.0) * std::pow(p, 4) - 30.0 * k * std::pow(p, 5),
        (440.0 * k - 6.0) - 80.0 * k * p - 40.0 * k * p * p,
        (320.0 * k + 6.0) * std::pow(p, -2),
    };
    return out;
}

/// The four bounds used to control one-step changes, evaluated at t.
struct HelperInequalities {
    double d_over_qc = 0.0, d_bound = 0.0;        // d/(qc) <= 50/p
    double az2_over_qc = 0.0, az2_bound = 10.0;   // a z2/(qc) <= 10
    double a_over_qc = 0.0, a_bound = 0.0;        // a/(qc) <= 10/p^3
    double y_over_q = 0.0, y_bound = 0.0;         // y/q <= 10/p

    std::array<bool, 4> holds() const {
        return {d_over_qc <= d_bound, az2_over_qc <= az2_bound, a_over_qc <= a_bound, y_over_q <= y_bound};
    }
};

inline HelperInequalities helper_inequalities(double t, double s) {
    const double p = p_of(t);
    const double q = traj(Trajectory::q, t, s), c = traj(Trajectory::c, t, s);
    const double a = traj(Trajectory::a, t, s), d = traj(Trajectory::d, t, s);
    const double y = traj(Trajectory::y, t, s), z2 = traj(Trajectory::z2, t, s);
    HelperInequalities h;
    h.d_over_qc = d / (q * c);
    h.d_bound = 50.0 / p;
    h.az2_over_qc = a * z2 / (q * c);
    h.a_over_qc = a / (q * c);
    h.a_bound = 10.0 / (p * p * p);
    h.y_over_q = y / q;
    h.y_bound = 10.0 / p;
    return h;
}

/// `count` uniform points on [lo, hi], endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g;
    if (count == 0) return g;
    if (count == 1) return {lo};
    for (std::size_t i = 0; i < count; ++i) g.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    return g;
}

/// CSV: t,p,r,q,y,a,c1,c2,c,d,z0,z1,z2 and, with params, the log error functions.
inline void write_trajectory_csv(std::ostream& out, const std::vector<double>& grid, double s,
                                 const TrajectoryParams* params = nullptr) {
    static constexpr std::array<Trajectory, 10> cols{Trajectory::q,  Trajectory::y, Trajectory::a,  Trajectory::c1,
                                                     Trajectory::c2, Trajectory::c, Trajectory::d,  Trajectory::z0,
                                                     Trajectory::z1, Trajectory::z2};
    out << "t,p,r";
    for (Trajectory id : cols) out << ',' << to_string(id);
    if (params)
        for (ErrorFn e : kAllErrorFns) out << ",log_" << to_string(e);
    out << '\n';
    const auto old_precision = out.precision(12);
    for (double t : grid) {
        out << t << ',' << p_of(t) << ',' << r_of(t, s);
        for (Trajectory id : cols) out << ',' << traj(id, t, s);
        if (params)
            for (ErrorFn e : kAllErrorFns) out << ',' << log_err(e, t, *params);
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace ramsey_forge
