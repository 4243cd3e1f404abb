#include "mlfsm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mlfsm/errors.hpp"

namespace mlfsm {

namespace {

// Gauss(7)/Kronrod(15) nodes and weights on [-1, 1] (positive half).
constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkResult {
    double value = 0.0;
    double error = 0.0;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv_all[15];
    const double fc = f(c);
    double k15 = kK15Weights[7] * fc;
    double g7 = kG7Weights[3] * fc;
    fv_all[14] = fc;
    for (int i = 0; i < 7; ++i) {
        const double x = h * kK15Nodes[i];
        const double fm = f(c - x), fp = f(c + x);
        fv_all[2 * i] = fm;
        fv_all[2 * i + 1] = fp;
        k15 += kK15Weights[i] * (fm + fp);
        if (i % 2 == 1) g7 += kG7Weights[i / 2] * (fm + fp);
    }
    // QUADPACK-style error model: the raw |K15 - G7| gap is deflated against
    // the centered resolvent so kinked integrands do not stall the estimate.
    const double mean = 0.5 * k15;
    double resasc = kK15Weights[7] * std::abs(fc - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kK15Weights[i] *
                  (std::abs(fv_all[2 * i] - mean) + std::abs(fv_all[2 * i + 1] - mean));
    resasc *= h;
    double err = std::abs(k15 - g7) * h;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    GkResult r;
    r.value = k15 * h;
    r.error = err;
    return r;
}

// Globally adaptive: always split the interval with the largest error
// estimate until the summed estimate is below tol.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double tol, int max_intervals = 4000) {
    struct Node { double a, b; GkResult r; };
    auto worse = [](const Node& x, const Node& y) { return x.r.error < y.r.error; };
    std::vector<Node> heap{{a, b, gk15(f, a, b)}};

    auto total_error = [&]() {
        double e = 0.0;
        for (const auto& n : heap) e += n.r.error;
        return e;
    };

    while (static_cast<int>(heap.size()) < max_intervals && total_error() > tol) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        Node n = heap.back();
        heap.pop_back();
        if (n.b - n.a < 1e-15 * (b - a)) {   // cannot refine further
            heap.push_back(n);
            std::push_heap(heap.begin(), heap.end(), worse);
            break;
        }
        const double m = 0.5 * (n.a + n.b);
        heap.push_back({n.a, m, gk15(f, n.a, m)});
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back({m, n.b, gk15(f, m, n.b)});
        std::push_heap(heap.begin(), heap.end(), worse);
    }

    const double err = total_error();
    if (err > tol * 100.0)
        throw numerical_error("adaptive quadrature did not converge; achieved error " +
                              std::to_string(err));
    double total = 0.0;
    for (const auto& n : heap) total += n.r.value;
    return total;
}

} // namespace

double binomial_coeff(int n, int r) {
    double c = 1.0;
    for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
    return c;
}

bool is_levy_boundary(double H, double beta) {
    return std::abs(H - 1.0 / beta) < kLevyBoundaryTol;
}

double kernel_g(double H, double beta, int k, double s) {
    if (!(H > 0.0 && H < 1.0))
        throw input_error("kernel_g: H must lie in (0,1)");
    if (!(beta > 0.0 && beta <= 2.0))
        throw input_error("kernel_g: beta must lie in (0,2]");
    if (k < 1) throw input_error("kernel_g: differencing order k must be >= 1");
    if (is_levy_boundary(H, beta))
        throw numerical_error(
            "kernel_g: exponent H - 1/beta is degenerate (Levy boundary); use the "
            "i.i.d. increment path instead");
    if (s >= k) return 0.0;
    const double alpha = H - 1.0 / beta;
    double sum = 0.0;
    double sign = 1.0;
    for (int v = 0; v <= k; ++v) {
        const double base = v - s;
        if (base > 0.0) sum += sign * binomial_coeff(k, v) * std::pow(base, alpha);
        sign = -sign;
    }
    return sum;
}

namespace {

// g evaluated at s = v - t for small t > 0 without forming s, so the distance
// to the knot survives double roundoff: only the terms v' >= v are active and
// the singular one is t^alpha with t supplied exactly.
double kernel_g_near_knot(double alpha, int k, int v, double t_pow_alpha, double t) {
    double sum = ((v % 2 == 0) ? 1.0 : -1.0) * binomial_coeff(k, v) * t_pow_alpha;
    for (int vp = v + 1; vp <= k; ++vp) {
        const double sign = (vp % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binomial_coeff(k, vp) * std::pow(vp - v + t, alpha);
    }
    return sum;
}

// g(-t) for large t via the binomial series: t^alpha sum_m binom(alpha, m)
// D_m t^{-m} with D_m = sum_v (-1)^v C(k,v) v^m (zero below m = k). Avoids the
// catastrophic cancellation of the direct alternating sum.
double kernel_g_series(double alpha, int k, double t) {
    double acc = 0.0;
    double binom_alpha = 1.0;   // binom(alpha, m), updated incrementally
    for (int m = 0; m <= k + 16; ++m) {
        if (m > 0) binom_alpha *= (alpha - (m - 1)) / m;
        if (m >= k) {
            double dm = 0.0;
            double sign = 1.0;
            for (int v = 0; v <= k; ++v) {
                if (v > 0 || m == 0) dm += sign * binomial_coeff(k, v) * std::pow(v, m);
                sign = -sign;
            }
            acc += binom_alpha * dm * std::pow(t, -m);
        }
    }
    return std::pow(t, alpha) * acc;
}

} // namespace

double kernel_norm(double H, double beta, int k, double abs_tol) {
    const double alpha = H - 1.0 / beta;
    auto f = [&](double s) { return std::pow(std::abs(kernel_g(H, beta, k, s)), beta); };
    if (is_levy_boundary(H, beta)) {
        // Removable limit: the kernel tends to steps of height C(k-1, w) on
        // (w, w+1), matching the scale of k-th differences of the Levy motion.
        double acc = 0.0;
        for (int w = 0; w <= k - 1; ++w)
            acc += std::pow(binomial_coeff(k - 1, w), beta);
        return acc;
    }

    // Knot intervals [v-1, v] for v = k..0: the term (v - s)^alpha is singular
    // at the right endpoint when alpha < 1, so substitute s = v - w^m there
    // and evaluate g in knot-distance coordinates (t = w^m kept exact).
    // The transformed integrand behaves like w^{m(alpha*beta + 1) - 1}.
    double total = 0.0;
    const double sigma1 = alpha * beta + 1.0;   // = H*beta > 0
    const int m = std::max(3, static_cast<int>(std::ceil(6.0 / sigma1)));
    const double md = static_cast<double>(m);
    for (int v = k; v >= 0; --v) {
        auto sub = [&](double w) {
            if (w <= 0.0) return 0.0;
            const double t = std::pow(w, md);
            const double t_alpha = std::pow(w, md * alpha);
            const double g = kernel_g_near_knot(alpha, k, v, t_alpha, t);
            return std::pow(std::abs(g), beta) * md * std::pow(w, md - 1.0);
        };
        total += adaptive_gk(sub, 0.0, 1.0, abs_tol / (k + 4.0));
    }

    // Mid range down to -T0, plain quadrature.
    const double t0 = std::max(16.0 * k, 16.0);
    total += adaptive_gk(f, -t0, -1.0, abs_tol / 4.0);

    // Far tail: |g(-t)|^beta ~ t^{beta(H-k)-1}; map t = T0 x^{-q} onto (0,1]
    // so the transformed integrand vanishes like a power at x = 0, and use the
    // series form of g, which is stable for arbitrarily large t.
    const double decay = beta * (k - H);   // = |e + 1| > 0
    const double q = std::max(3.0, 6.0 / decay);
    auto tail = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double t = t0 * std::pow(x, -q);
        const double g = kernel_g_series(alpha, k, t);
        return std::pow(std::abs(g), beta) * q * t / x;
    };
    total += adaptive_gk(tail, 0.0, 1.0, abs_tol / 4.0);
    return total;
}

std::vector<double> btilde_from_b(const ModelParams& params, int k) {
    params.validate();
    std::vector<double> out;
    out.reserve(params.q());
    for (const auto& c : params.components)
        out.push_back(std::pow(c.b, c.beta) * kernel_norm(c.H, c.beta, k));
    return out;
}

std::vector<double> b_from_btilde(const std::vector<double>& btilde,
                                  const ModelParams& shape, int k) {
    if (btilde.size() != shape.q())
        throw input_error("b_from_btilde: size mismatch");
    std::vector<double> out;
    out.reserve(btilde.size());
    for (std::size_t j = 0; j < btilde.size(); ++j) {
        const auto& c = shape.components[j];
        if (!(btilde[j] > 0.0)) throw input_error("b_from_btilde: btilde must be positive");
        out.push_back(std::pow(btilde[j] / kernel_norm(c.H, c.beta, k), 1.0 / c.beta));
    }
    return out;
}

double fbm_c1sq(double H) {
    return std::tgamma(H + 0.5) * std::tgamma(2.0 - 2.0 * H) /
           (2.0 * H * std::tgamma(1.5 - H));
}

double fbm_kdiff_cov(double H, int k, int gamma_r, int gamma_s, long z) {
    // Cov(Y_s, Y_t) = c1sq (s^{2H} + t^{2H} - |t-s|^{2H}); the pure s- and
    // t-terms cancel under k-th order differencing (k >= 1).
    const double c = fbm_c1sq(H);
    double acc = 0.0;
    for (int v = 0; v <= k; ++v)
        for (int w = 0; w <= k; ++w) {
            const double sign = ((v + w) % 2 == 0) ? 1.0 : -1.0;
            const double dist = std::abs(static_cast<double>(z) - v * gamma_r + w * gamma_s);
            acc += sign * binomial_coeff(k, v) * binomial_coeff(k, w) *
                   std::pow(dist, 2.0 * H);
        }
    return -c * acc;
}

void ModelParams::validate() const {
    if (components.empty()) throw input_error("ModelParams: no components");
    for (std::size_t j = 0; j < components.size(); ++j) {
        const auto& c = components[j];
        if (!(c.b > 0.0)) throw input_error("ModelParams: b must be positive");
        if (!(c.H > 0.0 && c.H < 1.0)) throw input_error("ModelParams: H must lie in (0,1)");
        if (!(c.beta > 0.0 && c.beta <= 2.0))
            throw input_error("ModelParams: beta must lie in (0,2]");
        if (j > 0 && !(components[j - 1].H < c.H))
            throw input_error("ModelParams: Hurst indices must be strictly increasing");
    }
}

double SamplingScheme::resolved_truncation() const {
    if (truncation > 0.0) return truncation;
    return 200.0 * k * std::max(1, max_gamma);
}

double SamplingScheme::resolved_burn_in() const {
    return burn_in > 0.0 ? burn_in : resolved_truncation();
}

void SamplingScheme::validate() const {
    if (n == 0) throw input_error("SamplingScheme: n must be positive");
    if (!(delta > 0.0)) throw input_error("SamplingScheme: delta must be positive");
    if (k < 1) throw input_error("SamplingScheme: k must be >= 1");
    if (mesh < 1) throw input_error("SamplingScheme: mesh must be >= 1");
    if (max_gamma < 1) throw input_error("SamplingScheme: max_gamma must be >= 1");
    if (n < static_cast<std::size_t>(k * max_gamma) + 1)
        throw input_error("SamplingScheme: n must be at least k*max_gamma + 1");
    if (resolved_truncation() <= k * max_gamma)
        throw input_error("SamplingScheme: truncation must exceed k*max_gamma");
}

const std::vector<double>& IncrementPanel::column_for(int gamma) const {
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (gammas[i] == gamma) return columns[i];
    throw input_error("IncrementPanel: no column for lag " + std::to_string(gamma));
}

} // namespace mlfsm
