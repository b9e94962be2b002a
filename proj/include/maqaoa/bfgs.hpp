#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace maqaoa {

struct BfgsOptions {
    double gradient_tolerance = 1e-6; // infinity norm
    double value_tolerance = 1e-10;   // |f_new - f_old|
    int max_iterations = 500;
    double armijo = 1e-4;
    double contraction = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 60;
};

enum class BfgsStatus { gradient_converged, value_converged, max_iterations, line_search_failed, non_finite };

constexpr std::string_view to_string(BfgsStatus s) {
    switch (s) {
    case BfgsStatus::gradient_converged:
        return "gradient_converged";
    case BfgsStatus::value_converged:
        return "value_converged";
    case BfgsStatus::max_iterations:
        return "max_iterations";
    case BfgsStatus::line_search_failed:
        return "line_search_failed";
    case BfgsStatus::non_finite:
        return "non_finite";
    }
    return "unknown";
}

struct BfgsResult {
    double value = 0.0;
    std::vector<double> x;
    std::vector<double> trace; // objective at the start and after every iteration
    int iterations = 0;
    BfgsStatus status = BfgsStatus::max_iterations;
    std::uint64_t value_calls = 0;
    std::uint64_t gradient_calls = 0;
    std::uint64_t matrix_ops = 0; // multiply-adds spent on the inverse-Hessian
};

/// Maximizes value(x) by BFGS with an Armijo backtracking line search.
///
/// value(x) -> double and gradient(x, out) -> double (returns value(x) too)
/// must describe the same smooth function. The inverse Hessian starts as the
/// identity, is rescaled by s.y / y.y before the first update, and is reset
/// to the identity whenever the quasi-Newton direction stops being an ascent
/// direction or its line search fails.
template <typename ValueFn, typename GradientFn>
BfgsResult bfgs_maximize(ValueFn&& value, GradientFn&& gradient, std::vector<double> start,
                         const BfgsOptions& opts = {}) {
    const std::size_t dim = start.size();
    BfgsResult out;
    out.x = std::move(start);

    auto finite = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
    };

    std::vector<double> g(dim), g_new(dim), d(dim), x_new(dim), s(dim), y(dim), hy(dim);
    std::vector<double> h(dim * dim, 0.0);
    auto reset_h = [&] {
        std::fill(h.begin(), h.end(), 0.0);
        for (std::size_t i = 0; i < dim; ++i)
            h[i * dim + i] = 1.0;
    };
    reset_h();
    bool h_is_identity = true;
    bool h_scaled = false;

    double f = gradient(std::span<const double>(out.x), std::span<double>(g));
    ++out.gradient_calls;
    out.value = f;
    out.trace.push_back(f);
    if (!std::isfinite(f) || !finite(g) || !finite(out.x)) {
        out.status = BfgsStatus::non_finite;
        return out;
    }

    for (out.iterations = 0; out.iterations < opts.max_iterations;) {
        double gmax = 0.0;
        for (double t : g)
            gmax = std::max(gmax, std::abs(t));
        if (gmax < opts.gradient_tolerance) {
            out.status = BfgsStatus::gradient_converged;
            return out;
        }

        // ascent direction d = H g
        for (std::size_t i = 0; i < dim; ++i) {
            double acc = 0.0;
            const double* row = &h[i * dim];
            for (std::size_t j = 0; j < dim; ++j)
                acc += row[j] * g[j];
            d[i] = acc;
        }
        out.matrix_ops += dim * dim;
        double slope = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
            slope += g[i] * d[i];
        if (!(slope > 0.0)) {
            reset_h();
            h_is_identity = true;
            d = g;
            slope = 0.0;
            for (double t : g)
                slope += t * t;
        }

        double alpha = opts.initial_step;
        double f_new = f;
        bool accepted = false;
        for (int k = 0; k < opts.max_backtracks; ++k) {
            for (std::size_t i = 0; i < dim; ++i)
                x_new[i] = out.x[i] + alpha * d[i];
            f_new = value(std::span<const double>(x_new));
            ++out.value_calls;
            if (std::isfinite(f_new) && f_new >= f + opts.armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= opts.contraction;
        }
        if (!accepted) {
            if (!h_is_identity) {
                reset_h();
                h_is_identity = true;
                continue;
            }
            out.status = BfgsStatus::line_search_failed;
            return out;
        }

        f_new = gradient(std::span<const double>(x_new), std::span<double>(g_new));
        ++out.gradient_calls;
        if (!std::isfinite(f_new) || !finite(g_new)) {
            out.status = BfgsStatus::non_finite;
            return out;
        }
        ++out.iterations;

        // curvature pair for the minimization of -f
        double sy = 0.0, yy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            s[i] = x_new[i] - out.x[i];
            y[i] = g[i] - g_new[i];
            sy += s[i] * y[i];
            yy += y[i] * y[i];
            ss += s[i] * s[i];
        }
        if (sy > 1e-10 * std::sqrt(ss * yy)) {
            if (!h_scaled) {
                const double scale = sy / yy;
                for (std::size_t i = 0; i < dim; ++i)
                    h[i * dim + i] = scale;
                h_scaled = true;
            }
            // H <- H - rho (Hy s' + s (Hy)') + (rho^2 y'Hy + rho) s s'
            const double rho = 1.0 / sy;
            double yhy = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double acc = 0.0;
                const double* row = &h[i * dim];
                for (std::size_t j = 0; j < dim; ++j)
                    acc += row[j] * y[j];
                hy[i] = acc;
                yhy += y[i] * acc;
            }
            const double coeff = rho * rho * yhy + rho;
            for (std::size_t i = 0; i < dim; ++i) {
                double* row = &h[i * dim];
                const double a = rho * hy[i];
                const double b = rho * s[i];
                const double c = coeff * s[i];
                for (std::size_t j = 0; j < dim; ++j)
                    row[j] += c * s[j] - a * s[j] - b * hy[j];
            }
            out.matrix_ops += 2 * dim * dim;
            h_is_identity = false;
        }

        const double change = std::abs(f_new - f);
        out.x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        out.value = f;
        out.trace.push_back(f);
        if (change < opts.value_tolerance) {
            out.status = BfgsStatus::value_converged;
            return out;
        }
    }
    out.status = BfgsStatus::max_iterations;
    return out;
}

/// Object form: obj.value(x) and obj.gradient(x, out).
template <typename Objective>
BfgsResult bfgs_maximize(Objective& obj, std::vector<double> start, const BfgsOptions& opts = {}) {
    return bfgs_maximize([&](std::span<const double> x) { return obj.value(x); },
                         [&](std::span<const double> x, std::span<double> g) { return obj.gradient(x, g); },
                         std::move(start), opts);
}

/// Central differences, h = step; returns value(x) as well (one extra call).
template <typename ValueFn>
double central_difference_gradient(ValueFn&& value, std::span<const double> x, std::span<double> grad,
                                   double step) {
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = value(std::span<const double>(probe));
        probe[i] = x[i] - step;
        const double down = value(std::span<const double>(probe));
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return value(x);
}

} // namespace maqaoa
