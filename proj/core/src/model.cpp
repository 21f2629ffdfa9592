#include "hopfspec/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "hopfspec/quadrature.hpp"

namespace hopfspec::model {

namespace {

constexpr double two_pi = 2.0 * M_PI;

// Exponent of the unnormalized radial density, g(r) = delta r^2/eps^2 - r^4/(2 eps^2).
double density_exponent(const ModelParams& p, double r) {
    const double e2 = p.epsilon * p.epsilon;
    const double r2 = r * r;
    return (p.delta * r2 - 0.5 * r2 * r2) / e2;
}

struct RadialMoments {
    double g_max;      // sup of the exponent, used to shift before quadrature
    double i1;         // int_0^inf r   exp(g - g_max) dr
    double i3;         // int_0^inf r^3 exp(g - g_max) dr
};

RadialMoments compute_radial_moments(const ModelParams& p) {
    const double e2 = p.epsilon * p.epsilon;
    const double g_max = p.delta > 0.0 ? p.delta * p.delta / (2.0 * e2) : 0.0;
    // Cutoff where the shifted exponent has decayed below exp(-120).
    const double x_max = p.delta + std::sqrt(p.delta * p.delta + 240.0 * e2);
    const double r_max = std::sqrt(x_max);
    const auto f1 = [&](double r) { return r * std::exp(density_exponent(p, r) - g_max); };
    const auto f3 = [&](double r) {
        return r * r * r * std::exp(density_exponent(p, r) - g_max);
    };
    RadialMoments m;
    m.g_max = g_max;
    m.i1 = simpson(f1, 0.0, r_max, 1 << 13);
    m.i3 = simpson(f3, 0.0, r_max, 1 << 13);
    return m;
}

const RadialMoments& radial_moments(const ModelParams& p) {
    static std::mutex mutex;
    static std::map<std::pair<double, double>, RadialMoments> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(p.delta, p.epsilon);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, compute_radial_moments(p)).first;
    }
    return it->second;
}

void require_density(const ModelParams& p, const char* who) {
    p.validate();
    if (p.epsilon <= 0.0) {
        throw DomainError(std::string(who) + ": no stationary density for epsilon = 0");
    }
}

Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Mat2 mat_add(const Mat2& a, const Mat2& b, double sb = 1.0) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][j] + sb * b[i][j];
    return c;
}

Mat2 mat_transpose(const Mat2& a) {
    return Mat2{{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}};
}

// Polar Jacobian on the cycle, eigenvalues (-2 delta, 0).
Mat2 cycle_jacobian_polar(const ModelParams& p) {
    const double s = std::sqrt(p.delta);
    return Mat2{{{-2.0 * p.delta, 0.0}, {-2.0 * p.beta * s, 0.0}}};
}

// exp(t J) for J with J^2 = -2 delta J: exp(t J) = I + J (exp(-2 delta t) - 1)/(-2 delta).
Mat2 exp_cycle_jacobian(const ModelParams& p, double t) {
    const Mat2 j = cycle_jacobian_polar(p);
    const double c = (std::exp(-2.0 * p.delta * t) - 1.0) / (-2.0 * p.delta);
    Mat2 e{{{1.0, 0.0}, {0.0, 1.0}}};
    return mat_add(e, j, c);
}

} // namespace

Vec2 drift_cartesian(const ModelParams& params, double x, double y) {
    const double r2 = x * x + y * y;
    const double a = params.delta - r2;
    const double b = params.gamma - params.beta * r2;
    return {a * x - b * y, b * x + a * y};
}

Vec2 drift_polar(const ModelParams& params, double r) {
    if (!(r > 0.0)) {
        throw DomainError("drift_polar: r must be positive");
    }
    const double e2 = params.epsilon * params.epsilon;
    return {params.delta * r - r * r * r + 0.5 * e2 / r,
            params.gamma - params.beta * r * r};
}

double stationary_density(const ModelParams& params, double r) {
    require_density(params, "stationary_density");
    if (r < 0.0) {
        throw DomainError("stationary_density: r must be >= 0");
    }
    const RadialMoments& m = radial_moments(params);
    return r * std::exp(density_exponent(params, r) - m.g_max) / (two_pi * m.i1);
}

double stationary_density_xy(const ModelParams& params, double x, double y) {
    require_density(params, "stationary_density_xy");
    const double r = std::hypot(x, y);
    const RadialMoments& m = radial_moments(params);
    return std::exp(density_exponent(params, r) - m.g_max) / (two_pi * m.i1);
}

double estimate_sigma_hat(const ModelParams& params) {
    require_density(params, "estimate_sigma_hat");
    const RadialMoments& m = radial_moments(params);
    return std::sqrt(0.5 * m.i3 / m.i1);
}

double asymptotic_phase_unwrapped(const ModelParams& params, double r, double theta) {
    if (!(r > 0.0)) {
        throw DomainError("asymptotic_phase: r must be positive");
    }
    const double beta = params.beta;
    const double delta = params.delta;
    if (delta > 0.0) {
        return theta - beta * std::log(r / std::sqrt(delta));
    }
    if (delta == 0.0) {
        return theta - beta * std::log(r);
    }
    // delta < 0: the argument r^2 - delta is positive for all r > 0.
    return theta - 0.5 * beta * std::log(r * r - delta) +
           0.5 * beta * std::log(-delta);
}

double asymptotic_phase(const ModelParams& params, double r, double theta) {
    double phi = std::fmod(asymptotic_phase_unwrapped(params, r, theta), two_pi);
    if (phi < 0.0) phi += two_pi;
    return phi;
}

Mat2 FloquetData::Z(double t) const {
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    return Mat2{{{c, -s}, {s, c}}};
}

Mat2 FloquetData::M(double t) const {
    // exp(t R) with R^2 = -2 delta R; the rate is exponents[0] = -2 delta.
    const double a = exponents[0];
    Mat2 etr{{{1.0, 0.0}, {0.0, 1.0}}};
    const double c = (std::exp(a * t) - 1.0) / a;
    etr = mat_add(etr, R, c);
    return mat_mul(Z(t), etr);
}

std::array<double, 2> FloquetData::multipliers() const {
    return {std::exp(period * exponents[0]), 1.0};
}

FloquetData floquet_data(const ModelParams& params) {
    params.validate();
    if (params.delta <= 0.0) {
        throw DomainError("floquet_data: no limit cycle for delta <= 0");
    }
    const double s = std::sqrt(params.delta);
    FloquetData fd;
    fd.omega = params.angular_frequency();
    fd.period = two_pi / fd.omega;
    fd.exponents = {-2.0 * params.delta, 0.0};
    fd.e1 = {1.0, params.beta / s};
    fd.e2 = {0.0, 1.0};
    fd.f1 = {1.0, 0.0};
    fd.f2 = {-params.beta / s, 1.0};
    // R = J_polar^{-1} J_Gamma J_polar at theta0 = 0, with J_polar = diag(1, 1/sqrt(delta)).
    fd.R = Mat2{{{-2.0 * params.delta, 0.0}, {-2.0 * params.beta * params.delta, 0.0}}};
    return fd;
}

double phase_diffusion_coefficient(const ModelParams& params) {
    if (params.delta <= 0.0) {
        throw DomainError("phase_diffusion_coefficient: no limit cycle for delta <= 0");
    }
    return phase_diffusion_coefficient(
        params, Mat2{{{1.0, 0.0}, {0.0, 1.0 / params.delta}}});
}

double phase_diffusion_coefficient(const ModelParams& params, const Mat2& diffusion_polar) {
    params.validate();
    if (params.delta <= 0.0) {
        throw DomainError("phase_diffusion_coefficient: no limit cycle for delta <= 0");
    }
    const double omega = params.angular_frequency();
    const double s = std::sqrt(params.delta);
    // The prefactor omega^2 and the 1/omega normalizations of f2 (left neutral
    // vector scaled so that <e2, f2> = 1 with e2 = (0, omega)) cancel exactly;
    // working with the unscaled f2 keeps the formula finite when omega -> 0.
    // The averaging window is one period, or a reference window at omega = 0.
    const double T = omega != 0.0 ? two_pi / std::abs(omega) : two_pi;

    // C(T) = int_0^T E(T-s) D E(T-s)^T ds in the co-moving polar frame,
    // E(t) = exp(t J_Gamma), by composite Simpson.
    constexpr int panels = 512;
    const double h = T / panels;
    Mat2 c_total{};
    for (int i = 0; i <= panels; ++i) {
        const double si = h * i;
        const Mat2 e = exp_cycle_jacobian(params, T - si);
        const Mat2 term = mat_mul(mat_mul(e, diffusion_polar), mat_transpose(e));
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        c_total = mat_add(c_total, term, w);
    }
    c_total = mat_add(Mat2{}, c_total, h / 3.0);

    const Vec2 f2{-params.beta / s, 1.0};
    const double cf_f = f2[0] * (c_total[0][0] * f2[0] + c_total[0][1] * f2[1]) +
                        f2[1] * (c_total[1][0] * f2[0] + c_total[1][1] * f2[1]);
    const double eps2 = params.epsilon * params.epsilon;
    return -eps2 / T * cf_f;
}

Vec2 lie_bracket_radial(const ModelParams& params, double sigma, double r) {
    if (!(r > 0.0)) {
        throw DomainError("lie_bracket_radial: r must be positive");
    }
    return {-sigma * (params.delta - 3.0 * r * r), -2.0 * sigma * params.beta * r};
}

Vec2 ForcingField::evaluate(double r, double theta) const {
    switch (kind) {
        case Kind::radial_constant:
            return {sigma, 0.0};
        case Kind::azimuthal_constant:
            return {0.0, sigma};
        case Kind::general:
            return field(r, theta);
    }
    return {0.0, 0.0};
}

ForcingField ForcingField::radial(double sigma) {
    ForcingField f;
    f.kind = Kind::radial_constant;
    f.sigma = sigma;
    return f;
}

ForcingField ForcingField::azimuthal(double sigma) {
    ForcingField f;
    f.kind = Kind::azimuthal_constant;
    f.sigma = sigma;
    return f;
}

ForcingField ForcingField::general(std::function<Vec2(double, double)> fn) {
    ForcingField f;
    f.kind = Kind::general;
    f.field = std::move(fn);
    return f;
}

ForcingField ForcingField::isochron_tangent(const ModelParams& params, double sigma) {
    const double beta = params.beta;
    return general([sigma, beta](double r, double) -> Vec2 {
        return {sigma, sigma * beta / r};
    });
}

namespace {

using Field = std::function<Vec2(double, double)>;

// Lie bracket [u, v] = Dv u - Du v with central-difference Jacobians.
Field numerical_bracket(const Field& u, const Field& v) {
    return [u, v](double r, double theta) -> Vec2 {
        const double h = 1e-5 * std::max(1.0, r);
        const auto jac_times = [h](const Field& f, double r0, double th0,
                                   const Vec2& w) -> Vec2 {
            const Vec2 fr_p = f(r0 + h, th0), fr_m = f(r0 - h, th0);
            const Vec2 ft_p = f(r0, th0 + h), ft_m = f(r0, th0 - h);
            const double dfr_dr = (fr_p[0] - fr_m[0]) / (2.0 * h);
            const double dfr_dt = (ft_p[0] - ft_m[0]) / (2.0 * h);
            const double dft_dr = (fr_p[1] - fr_m[1]) / (2.0 * h);
            const double dft_dt = (ft_p[1] - ft_m[1]) / (2.0 * h);
            return {dfr_dr * w[0] + dfr_dt * w[1], dft_dr * w[0] + dft_dt * w[1]};
        };
        const Vec2 uq = u(r, theta);
        const Vec2 vq = v(r, theta);
        const Vec2 dv_u = jac_times(v, r, theta, uq);
        const Vec2 du_v = jac_times(u, r, theta, vq);
        return {dv_u[0] - du_v[0], dv_u[1] - du_v[1]};
    };
}

} // namespace

int hormander_rank(const ModelParams& params, const ForcingField& forcing, double r,
                   double theta, int depth) {
    params.validate();
    if (!(r > 0.0)) {
        throw DomainError("hormander_rank: r must be positive");
    }
    if (depth < 1) {
        throw ConfigError("hormander_rank: depth must be >= 1");
    }
    const ModelParams p = params;
    Field drift = [p](double rr, double) -> Vec2 {
        return {p.delta * rr - rr * rr * rr, p.gamma - p.beta * rr * rr};
    };
    Field v1 = [&forcing](double rr, double th) -> Vec2 { return forcing.evaluate(rr, th); };

    std::vector<Field> collection{v1};
    std::size_t level_begin = 0;
    for (int k = 0; k < depth; ++k) {
        const std::size_t level_end = collection.size();
        for (std::size_t i = level_begin; i < level_end; ++i) {
            collection.push_back(numerical_bracket(drift, collection[i]));
            collection.push_back(numerical_bracket(v1, collection[i]));
        }
        level_begin = level_end;
    }

    Eigen::MatrixXd span(2, static_cast<Eigen::Index>(collection.size()));
    for (std::size_t i = 0; i < collection.size(); ++i) {
        const Vec2 v = collection[i](r, theta);
        span(0, static_cast<Eigen::Index>(i)) = v[0];
        span(1, static_cast<Eigen::Index>(i)) = v[1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double tol = 1e-6 * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank;
}

double potential(const ModelParams& params, double r) {
    if (r < 0.0) {
        throw DomainError("potential: r must be >= 0");
    }
    const double r2 = r * r;
    return -0.5 * params.delta * r2 + 0.25 * r2 * r2;
}

} // namespace hopfspec::model
