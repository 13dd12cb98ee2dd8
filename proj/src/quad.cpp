#include "cosbem/quad.hpp"

#include "cosbem/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace cosbem::quad {

namespace {

const std::array<double, 5> gl5_x = {-0.9061798459386639928, -0.53846931010568309104, 0.0,
                                     0.53846931010568309104, 0.9061798459386639928};
const std::array<double, 5> gl5_w = {0.23692688505618908751, 0.47862867049936646804,
                                     0.56888888888888888889, 0.47862867049936646804,
                                     0.23692688505618908751};
const std::array<double, 8> gl8_x = {-0.96028985649753623168, -0.79666647741362673959,
                                     -0.52553240991632898582, -0.18343464249564980494,
                                     0.18343464249564980494,  0.52553240991632898582,
                                     0.79666647741362673959,  0.96028985649753623168};
const std::array<double, 8> gl8_w = {0.10122853629037625915, 0.22238103445337447054,
                                     0.31370664587788728734, 0.36268378337836198297,
                                     0.36268378337836198297, 0.31370664587788728734,
                                     0.22238103445337447054, 0.10122853629037625915};
const std::array<double, 10> gl10_x = {-0.97390652851717172008, -0.86506336668898451073,
                                       -0.67940956829902440623, -0.4333953941292471908,
                                       -0.14887433898163121088, 0.14887433898163121088,
                                       0.4333953941292471908,   0.67940956829902440623,
                                       0.86506336668898451073,  0.97390652851717172008};
const std::array<double, 10> gl10_w = {0.066671344308688137594, 0.14945134915058059315,
                                       0.219086362515982044,    0.26926671930999635509,
                                       0.29552422471475287017,  0.29552422471475287017,
                                       0.26926671930999635509,  0.219086362515982044,
                                       0.14945134915058059315,  0.066671344308688137594};
const std::array<double, 16> gl16_x = {
    -0.9894009349916499326,   -0.94457502307323257608, -0.86563120238783174388,
    -0.7554044083550030339,   -0.61787624440264374845, -0.45801677765722738634,
    -0.28160355077925891323,  -0.095012509837637440185, 0.095012509837637440185,
    0.28160355077925891323,   0.45801677765722738634,   0.61787624440264374845,
    0.7554044083550030339,    0.86563120238783174388,   0.94457502307323257608,
    0.9894009349916499326};
const std::array<double, 16> gl16_w = {
    0.027152459411754094852, 0.062253523938647892863, 0.09515851168249278481,
    0.12462897125553387205,  0.14959598881657673208,  0.16915651939500253819,
    0.18260341504492358887,  0.18945061045506849629,  0.18945061045506849629,
    0.18260341504492358887,  0.16915651939500253819,  0.14959598881657673208,
    0.12462897125553387205,  0.09515851168249278481,  0.062253523938647892863,
    0.027152459411754094852};

// QUADPACK G7/K15 pair, positive half (nodes are symmetric).
const std::array<double, 8> k15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const std::array<double, 8> k15_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const std::array<double, 4> g7_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double value;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = f(c);
    double kronrod = k15_w[7] * fc;
    double gauss = g7_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * k15_x[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += k15_w[i] * fsum;
        if (i % 2 == 1) gauss += g7_w[i / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    double err = std::abs(kronrod - gauss);
    // QUADPACK-style error sharpening
    if (err > 0.0) err = std::pow(200.0 * err, 1.5);
    return {kronrod, err};
}

double adaptive_gk(const std::function<double(double)>& f, double lo, double hi,
                   double abs_tol, double rel_tol) {
    struct Seg {
        double lo, hi, value, error;
    };
    GkResult whole = gk15(f, lo, hi);
    std::vector<Seg> segs{{lo, hi, whole.value, whole.error}};
    const int max_segments = 2000;

    for (;;) {
        double total = 0.0, total_err = 0.0;
        for (const Seg& s : segs) {
            total += s.value;
            total_err += s.error;
        }
        const double target = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= target) break;
        if (static_cast<int>(segs.size()) >= max_segments)
            throw numeric_error("integrate_1d: no convergence after " +
                                std::to_string(max_segments) +
                                " subdivisions, error estimate " + std::to_string(total_err));
        // split the segment with the largest error (first such, for determinism)
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        Seg s = segs[worst];
        const double mid = 0.5 * (s.lo + s.hi);
        GkResult left = gk15(f, s.lo, mid);
        GkResult right = gk15(f, mid, s.hi);
        segs[worst] = {s.lo, mid, left.value, left.error};
        segs.push_back({mid, s.hi, right.value, right.error});
    }

    // fixed summation order: ascending by left endpoint
    std::sort(segs.begin(), segs.end(),
              [](const Seg& a, const Seg& b) { return a.lo < b.lo; });
    double total = 0.0;
    for (const Seg& s : segs) total += s.value;
    return total;
}

struct Cell2 {
    double x_lo, x_hi, y_lo, y_hi;
    int depth;
};

double tensor_gl(const std::function<double(double, double)>& f, const Cell2& c, int n) {
    auto xs = gauss_nodes(n);
    auto ws = gauss_weights(n);
    const double cx = 0.5 * (c.x_lo + c.x_hi), hx = 0.5 * (c.x_hi - c.x_lo);
    const double cy = 0.5 * (c.y_lo + c.y_hi), hy = 0.5 * (c.y_hi - c.y_lo);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = cx + hx * xs[i];
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += ws[j] * f(x, cy + hy * xs[j]);
        sum += ws[i] * row;
    }
    return sum * hx * hy;
}

} // namespace

std::span<const double> gauss_nodes(int n) {
    switch (n) {
        case 5: return gl5_x;
        case 8: return gl8_x;
        case 10: return gl10_x;
        case 16: return gl16_x;
        default: throw std::invalid_argument("gauss_nodes: unsupported order");
    }
}

std::span<const double> gauss_weights(int n) {
    switch (n) {
        case 5: return gl5_w;
        case 8: return gl8_w;
        case 10: return gl10_w;
        case 16: return gl16_w;
        default: throw std::invalid_argument("gauss_weights: unsupported order");
    }
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    double abs_tol, double rel_tol, Endpoint endpoint) {
    if (lo > hi) throw std::invalid_argument("integrate_1d: lo > hi");
    if (lo == hi) return 0.0;
    switch (endpoint) {
        case Endpoint::none:
            return adaptive_gk(f, lo, hi, abs_tol, rel_tol);
        case Endpoint::singular_hi: {
            // x = hi - u^2 removes a (hi - x)^{-1/2} endpoint
            const double u_max = std::sqrt(hi - lo);
            auto g = [&](double u) { return 2.0 * u * f(hi - u * u); };
            return adaptive_gk(g, 0.0, u_max, abs_tol, rel_tol);
        }
        case Endpoint::singular_lo: {
            const double u_max = std::sqrt(hi - lo);
            auto g = [&](double u) { return 2.0 * u * f(lo + u * u); };
            return adaptive_gk(g, 0.0, u_max, abs_tol, rel_tol);
        }
    }
    throw std::invalid_argument("integrate_1d: bad endpoint mode");
}

double integrate_cell_2d(const std::function<double(double, double)>& f,
                         double x_lo, double x_hi, double y_lo, double y_hi,
                         double abs_tol, double rel_tol) {
    if (x_lo > x_hi || y_lo > y_hi)
        throw std::invalid_argument("integrate_cell_2d: inverted bounds");
    if (x_lo == x_hi || y_lo == y_hi) return 0.0;

    const int max_depth = 11;
    std::vector<Cell2> stack{{x_lo, x_hi, y_lo, y_hi, 0}};
    double total = 0.0;
    double area = (x_hi - x_lo) * (y_hi - y_lo);
    long evaluated_cells = 0;

    while (!stack.empty()) {
        Cell2 c = stack.back();
        stack.pop_back();
        const double coarse = tensor_gl(f, c, 5);
        const double fine = tensor_gl(f, c, 8);
        const double frac = (c.x_hi - c.x_lo) * (c.y_hi - c.y_lo) / area;
        const double target =
            std::max(abs_tol * frac, rel_tol * std::abs(fine) * 0.25);
        if (std::abs(fine - coarse) <= target || c.depth >= max_depth) {
            if (c.depth >= max_depth && std::abs(fine - coarse) > 64.0 * std::max(target, 1e-300))
                throw numeric_error("integrate_cell_2d: refinement limit reached, residual " +
                                    std::to_string(std::abs(fine - coarse)));
            total += fine;
            if (++evaluated_cells > 200000)
                throw numeric_error("integrate_cell_2d: cell budget exhausted");
            continue;
        }
        const double xm = 0.5 * (c.x_lo + c.x_hi);
        const double ym = 0.5 * (c.y_lo + c.y_hi);
        // push in fixed order so traversal (and rounding) is reproducible
        stack.push_back({c.x_lo, xm, c.y_lo, ym, c.depth + 1});
        stack.push_back({xm, c.x_hi, c.y_lo, ym, c.depth + 1});
        stack.push_back({c.x_lo, xm, ym, c.y_hi, c.depth + 1});
        stack.push_back({xm, c.x_hi, ym, c.y_hi, c.depth + 1});
    }
    return total;
}

} // namespace cosbem::quad
