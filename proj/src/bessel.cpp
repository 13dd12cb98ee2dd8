#include "cosbem/bessel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cosbem::models {

namespace {

using cplx = std::complex<double>;

constexpr double pi = 3.141592653589793238462643383279502884;

// Olver's uniform asymptotic polynomials U_k(t); pairs are (power, coefficient).
struct Term {
    int pow;
    double c;
};
const std::array<Term, 1> u0 = {{{0, 1.0}}};
const std::array<Term, 2> u1 = {{{1, 0.125}, {3, -0.20833333333333333333}}};
const std::array<Term, 3> u2 = {{{2, 0.0703125},
                                 {4, -0.40104166666666666667},
                                 {6, 0.33420138888888888889}}};
const std::array<Term, 4> u3 = {{{3, 0.0732421875},
                                 {5, -0.89121093750000000000},
                                 {7, 1.8464626736111111111},
                                 {9, -1.0258125964506172840}}};
const std::array<Term, 5> u4 = {{{4, 0.11215209960937500000},
                                 {6, -2.3640869140625000000},
                                 {8, 8.7891235351562500000},
                                 {10, -11.207002616222993827},
                                 {12, 4.6695844234262474280}}};
const std::array<Term, 6> u5 = {{{5, 0.22710800170898437500},
                                 {7, -7.3687943594796316964},
                                 {9, 42.534998745388454861},
                                 {11, -91.818241543240017361},
                                 {13, 84.636217674600734632},
                                 {15, -28.212072558200244877}}};
const std::array<Term, 7> u6 = {{{6, 0.57250142097473144531},
                                 {8, -26.491430486951555525},
                                 {10, 218.19051174421159048},
                                 {12, -699.57962737613254123},
                                 {14, 1059.9904525279998779},
                                 {16, -765.25246814118164230},
                                 {18, 212.57013003921712286}}};
const std::array<Term, 8> u7 = {{{7, 1.7277275025844573975},
                                 {9, -108.09091978839465550},
                                 {11, 1200.9029132163524628},
                                 {13, -5305.6469786134031084},
                                 {15, 11655.393336864533248},
                                 {17, -13586.550006434137439},
                                 {19, 8061.7221817373093845},
                                 {21, -1919.4576623184069963}}};
const std::array<Term, 9> u8 = {{{8, 6.0740420012734830379},
                                 {10, -493.91530477308801242},
                                 {12, 7109.5143024893637214},
                                 {14, -41192.654968897551298},
                                 {16, 122200.46498301745979},
                                 {18, -203400.17728041553428},
                                 {20, 192547.00123253153236},
                                 {22, -96980.598388637513489},
                                 {24, 20204.291330966148643}}};
const std::array<Term, 10> u9 = {{{9, 24.380529699556063861},
                                  {11, -2499.8304818112096241},
                                  {13, 45218.768981362726273},
                                  {15, -331645.17248456357783},
                                  {17, 1268365.2733216247816},
                                  {19, -2813563.2265865341107},
                                  {21, 3763271.2976564039964},
                                  {23, -2998015.9185381067501},
                                  {25, 1311763.6146629772007},
                                  {27, -242919.18790055133346}}};

template <std::size_t N>
cplx eval_poly(const std::array<Term, N>& terms, cplx t) {
    // powers are sparse; build t^k incrementally
    cplx acc = 0.0;
    cplx tp = 1.0;
    int cur = 0;
    for (const Term& tm : terms) {
        while (cur < tm.pow) {
            tp *= t;
            ++cur;
        }
        acc += tm.c * tp;
    }
    return acc;
}

// log of the ascending power series, |z| small or small relative to nu.
cplx series_log(double nu, cplx z) {
    const cplx q = 0.25 * z * z;
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 0; k < 5000; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) + std::log(sum);
}

// log I_mu(z) by Olver's large-order expansion; requires mu large enough that
// the U_k/mu^k tail is below ~1e-13 for the given w = z/mu.
cplx olver_log(double mu, cplx z) {
    const cplx w = z / mu;
    const cplx s = std::sqrt(1.0 + w * w);
    const cplx eta = s + std::log(w / (1.0 + s));
    const cplx t = 1.0 / s;
    const double inv_mu = 1.0 / mu;
    cplx sum = 0.0;
    double p = 1.0;
    sum += eval_poly(u0, t) * p;
    p *= inv_mu; sum += eval_poly(u1, t) * p;
    p *= inv_mu; sum += eval_poly(u2, t) * p;
    p *= inv_mu; sum += eval_poly(u3, t) * p;
    p *= inv_mu; sum += eval_poly(u4, t) * p;
    p *= inv_mu; sum += eval_poly(u5, t) * p;
    p *= inv_mu; sum += eval_poly(u6, t) * p;
    p *= inv_mu; sum += eval_poly(u7, t) * p;
    p *= inv_mu; sum += eval_poly(u8, t) * p;
    p *= inv_mu; sum += eval_poly(u9, t) * p;
    return mu * eta - 0.5 * std::log(2.0 * pi * mu) - 0.25 * std::log(1.0 + w * w) +
           std::log(sum);
}

// Olver evaluation at a raised order followed by stable downward recurrence
// I_{m-1}(z) = I_{m+1}(z) + (2m/z) I_m(z).
cplx olver_with_recurrence(double nu, cplx z) {
    const double az = std::abs(z);
    double target = 45.0;
    if (std::abs(std::arg(z)) > pi / 3.0) target = std::max(target, 2.6 * az);
    int steps = 0;
    if (nu < target) steps = static_cast<int>(std::ceil(target - nu));
    const double mu = nu + steps;

    const cplx log_hi1 = olver_log(mu + 1.0, z);
    const cplx log_hi0 = olver_log(mu, z);
    if (steps == 0) return log_hi0;

    double offset = log_hi0.real();
    cplx upper = std::exp(log_hi1 - offset); // I_{m+1} scaled
    cplx mid = std::exp(log_hi0 - offset);   // I_m scaled
    const cplx two_over_z = 2.0 / z;
    for (int k = steps; k >= 1; --k) {
        const double order = nu + k;
        cplx lower = upper + order * two_over_z * mid;
        upper = mid;
        mid = lower;
        const double mag = std::abs(mid);
        if (mag > 1e250) {
            const double scale = 1e-200;
            mid *= scale;
            upper *= scale;
            offset -= std::log(scale);
        }
    }
    return std::log(mid) + offset;
}

cplx log_i_right_half(double nu, cplx z) {
    const double az = std::abs(z);
    const bool mild_phase = (z.real() * z.real() >= z.imag() * z.imag()); // |arg z^2| <= pi/2
    const double series_radius = mild_phase ? 17.0 : 10.0;
    if (az <= series_radius || az <= 0.8 * nu) return series_log(nu, z);
    return olver_with_recurrence(nu, z);
}

} // namespace

namespace detail {

std::complex<double> log_bessel_i_unchecked(double nu, std::complex<double> z) {
    if (nu < 0.0) throw std::invalid_argument("log_bessel_i: order must be >= 0");
    if (z == 0.0) {
        if (nu == 0.0) return {0.0, 0.0};
        return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    cplx lg;
    if (z.real() < 0.0) {
        // I_nu(z e^{+-i pi}) = e^{+-i nu pi} I_nu(z); sign follows the half-plane
        const double s = z.imag() >= 0.0 ? 1.0 : -1.0;
        lg = cplx(0.0, s * nu * pi) + log_i_right_half(nu, -z);
    } else {
        lg = log_i_right_half(nu, z);
    }
    // principal value: the phase is only determined mod 2 pi by the branch
    // bookkeeping above, reduce it into (-pi, pi]
    return {lg.real(), std::remainder(lg.imag(), 2.0 * pi)};
}

} // namespace detail

std::complex<double> log_bessel_i(double nu, std::complex<double> z) {
    if (std::abs(z) >= 1e6)
        throw std::domain_error("log_bessel_i: |z| outside supported range");
    return detail::log_bessel_i_unchecked(nu, z);
}

} // namespace cosbem::models
