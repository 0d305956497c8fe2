#include "netcsd/detection.hpp"

#include <algorithm>
#include <cmath>

#include "netcsd/bifurcation.hpp"
#include "netcsd/errors.hpp"

namespace netcsd {

namespace {

constexpr double kDegenerateVariance = 1e-30;
constexpr double kUnitCircleTol = 1e-12;

Vec residual_at(const Trajectory& eps_traj, std::size_t i, double eps0_mean) {
    Vec r = eps_traj.state_at(i);
    for (double& x : r) x -= eps0_mean;
    return r;
}

/// Unbiased variance of a slice; 0 for windows shorter than two samples.
double slice_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    long double sum = 0.0L;
    for (double x : xs) sum += x;
    const long double m = sum / static_cast<long double>(xs.size());
    long double acc = 0.0L;
    for (double x : xs) acc += (x - m) * (x - m);
    return static_cast<double>(acc / static_cast<long double>(xs.size() - 1));
}

}  // namespace

std::vector<std::pair<double, Vec>> residual_series(const Trajectory& eps_traj, const Vec& eps0) {
    if (eps0.size() != eps_traj.states.cols())
        throw ValidationError("eps0 length does not match trajectory dimension");
    const double eps0_mean = mean(eps0);
    std::vector<std::pair<double, Vec>> out;
    out.reserve(eps_traj.sample_count());
    for (std::size_t i = 0; i < eps_traj.sample_count(); ++i)
        out.emplace_back(eps_traj.times[i], residual_at(eps_traj, i, eps0_mean));
    return out;
}

DetectionReport detect_and_localize(const Trajectory& eps_traj, const Vec& eps0,
                                    const DetectionConfig& cfg, const Graph& graph) {
    if (!(cfg.zeta > 0.0 && cfg.zeta < 1.0))
        throw ValidationError("zeta must lie strictly between 0 and 1");
    if (!(cfg.delta > 0.0)) throw ValidationError("delta must be strictly positive");
    if (!cfg.lambda3_lb.has_value() || !(*cfg.lambda3_lb > 0.0))
        throw ValidationError("a positive lambda_3 lower bound is required");
    if (static_cast<int>(eps_traj.states.cols()) != graph.node_count())
        throw ValidationError("trajectory dimension does not match the graph");

    DetectionReport report;
    report.config = cfg;
    report.t_star = std::log(1.0 / (cfg.zeta * cfg.zeta)) / *cfg.lambda3_lb;

    std::size_t read = eps_traj.sample_count();
    for (std::size_t i = 0; i < eps_traj.sample_count(); ++i) {
        if (eps_traj.times[i] >= report.t_star - 1e-12) {
            read = i;
            break;
        }
    }
    if (read == eps_traj.sample_count())
        throw InsufficientHorizon("trajectory ends before t* = " + std::to_string(report.t_star));

    const double eps0_mean = mean(eps0);
    Vec r;
    if (cfg.windowed_norm) {
        // Average the residual over [t*, t* + window]; the averaged vector is
        // read for both the norm test and the sign pattern.
        r.assign(eps_traj.states.cols(), 0.0);
        std::size_t count = 0;
        for (std::size_t i = read; i < eps_traj.sample_count(); ++i) {
            if (eps_traj.times[i] > report.t_star + cfg.window_seconds + 1e-12) break;
            const Vec ri = residual_at(eps_traj, i, eps0_mean);
            for (std::size_t j = 0; j < r.size(); ++j) r[j] += ri[j];
            ++count;
        }
        for (double& x : r) x /= static_cast<double>(count);
    } else {
        r = residual_at(eps_traj, read, eps0_mean);
    }

    report.read_index = read;
    report.read_time = eps_traj.times[read];
    report.residual_norm_at_read = norm2(r);
    report.sign_tol_used = cfg.sign_tol.value_or(1e-2 * norm_inf(r));
    report.bifurcating = report.residual_norm_at_read >= cfg.delta;

    if (report.bifurcating) {
        CutSet cut = cut_from_signs(graph, r, report.sign_tol_used);
        report.S = cut.nodes;
        report.boundary_edges = cut.boundary_edges;
        report.undetermined_nodes = cut.undetermined;
    }
    return report;
}

MovingStats moving_statistics(std::span<const double> series, std::size_t window) {
    if (window < 1) throw ValidationError("window must be at least 1");
    if (window > series.size())
        throw WindowTooLarge("window of " + std::to_string(window) + " exceeds series length " +
                             std::to_string(series.size()));
    MovingStats stats;
    const std::size_t count = series.size() - window + 1;
    stats.index.resize(count);
    stats.mean.resize(count);
    stats.variance.resize(count);

    long double sum = 0.0L;
    long double sumsq = 0.0L;
    for (std::size_t i = 0; i < window; ++i) {
        sum += series[i];
        sumsq += static_cast<long double>(series[i]) * series[i];
    }
    const auto w = static_cast<long double>(window);
    for (std::size_t i = 0;; ++i) {
        stats.index[i] = static_cast<double>(i + window - 1);
        const long double m = sum / w;
        stats.mean[i] = static_cast<double>(m);
        stats.variance[i] =
            window > 1 ? std::max(0.0, static_cast<double>((sumsq - w * m * m) / (w - 1.0L)))
                       : 0.0;
        if (i + 1 == count) break;
        sum += series[i + window] - series[i];
        sumsq += static_cast<long double>(series[i + window]) * series[i + window] -
                 static_cast<long double>(series[i]) * series[i];
    }
    return stats;
}

double ar1_autocorrelation(std::span<const double> series) {
    if (series.size() < 10) throw ValidationError("ar1_autocorrelation needs at least 10 samples");
    const std::size_t pairs = series.size() - 1;
    long double x_sum = 0.0L;
    long double y_sum = 0.0L;
    for (std::size_t t = 0; t < pairs; ++t) {
        x_sum += series[t];
        y_sum += series[t + 1];
    }
    const double x_mean = static_cast<double>(x_sum / static_cast<long double>(pairs));
    const double y_mean = static_cast<double>(y_sum / static_cast<long double>(pairs));

    long double num = 0.0L;
    long double den = 0.0L;
    for (std::size_t t = 0; t < pairs; ++t) {
        const double x = series[t] - x_mean;
        num += static_cast<long double>(x) * (series[t + 1] - y_mean);
        den += static_cast<long double>(x) * x;
    }
    if (den < kDegenerateVariance)
        throw DegenerateSeries("series variance is below 1e-30; slope is undefined");
    return static_cast<double>(num / den);
}

std::pair<Matrix, Matrix> gamma_matrices(double alpha, const ModelSpec& spec, double delta_t) {
    if (delta_t < 0.0) throw ValidationError("delta_t must be nonnegative");
    const Vec x_bar = stable_equilibrium(spec, alpha);
    const Matrix jac = linearized_jacobian(alpha, spec, x_bar);
    Matrix neg = jac;
    neg *= -1.0;
    const SpectralDecomposition d = spectral_decomp(neg);

    const std::size_t n = d.eigenvalues.size();
    Matrix gamma(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double decay = std::exp(-d.eigenvalues[k] * delta_t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                gamma(i, j) += decay * d.eigenvectors(i, k) * d.eigenvectors(j, k);
    }
    const Matrix q = projection_matrix(static_cast<int>(n));
    Matrix gamma_bar = q * gamma * q.transposed();
    return {std::move(gamma), std::move(gamma_bar)};
}

std::optional<double> theoretical_covariance_trace(const Matrix& gamma_bar, double sigma) {
    const SpectralDecomposition d = spectral_decomp(gamma_bar);
    double trace = 0.0;
    for (double mu : d.eigenvalues) {
        if (std::abs(mu) >= 1.0 - kUnitCircleTol) return std::nullopt;
        trace += sigma * sigma / (1.0 - mu * mu);
    }
    return trace;
}

CovarianceReport empirical_covariance_trace(const Trajectory& traj, const Vec& equilibrium,
                                            const Matrix& q, const AlarmConfig& alarm) {
    const std::size_t n = traj.states.cols();
    const std::size_t samples = traj.sample_count();
    if (equilibrium.size() != n)
        throw ValidationError("equilibrium length does not match trajectory dimension");
    if (q.cols() != n || q.rows() + 1 != n)
        throw ValidationError("projection matrix shape does not match trajectory dimension");
    if (samples < 2) throw ValidationError("covariance estimation needs at least two samples");

    CovarianceReport report;
    report.empirical_trace_series.reserve(samples);
    report.gamma_hat.resize(n);
    report.per_node_variance.resize(n);
    report.alarms.assign(n, false);

    // Deviations with the consensus component removed; the projected
    // coordinates Q e share their squared norm with these.
    Matrix centered(samples, n);
    for (std::size_t i = 0; i < samples; ++i) {
        double row_mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) row_mean += traj.states(i, j) - equilibrium[j];
        row_mean /= static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j)
            centered(i, j) = traj.states(i, j) - equilibrium[j] - row_mean;
    }

    // Growing-window trace of Cov[Q e_t] via per-component running moments;
    // the per-node running variances are kept alongside.
    const std::size_t reduced = n - 1;
    Vec run_mean(reduced, 0.0);
    Vec run_m2(reduced, 0.0);
    Vec node_mean(n, 0.0);
    Vec node_m2(n, 0.0);
    Vec e(n), projected(reduced);
    report.per_node_variance_series.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t j = 0; j < n; ++j) e[j] = centered(i, j);
        projected = q.apply(e);
        const auto k = static_cast<double>(i + 1);
        double trace = 0.0;
        for (std::size_t j = 0; j < reduced; ++j) {
            const double delta = projected[j] - run_mean[j];
            run_mean[j] += delta / k;
            run_m2[j] += delta * (projected[j] - run_mean[j]);
            if (i >= 1) trace += run_m2[j] / static_cast<double>(i);
        }
        Vec node_vars(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double delta = e[j] - node_mean[j];
            node_mean[j] += delta / k;
            node_m2[j] += delta * (e[j] - node_mean[j]);
            if (i >= 1) node_vars[j] = node_m2[j] / static_cast<double>(i);
        }
        report.empirical_trace_series.emplace_back(traj.times[i], trace);
        report.per_node_variance_series.push_back(std::move(node_vars));
    }
    report.final_trace = report.empirical_trace_series.back().second;

    // Alarm rule: a node's full-series variance against its early-window
    // baseline. A fixed-length window slid along the run would stay
    // stationary on a divergent random-walk mode (its increments are
    // stationary), so the growing window is the quantity that blows up.
    std::size_t window = alarm.window != 0 ? alarm.window : std::max<std::size_t>(10, samples / 50);
    window = std::min(window, samples);

    Vec node_series(samples);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < samples; ++i) node_series[i] = centered(i, j);
        report.per_node_variance[j] = slice_variance(node_series);
        try {
            report.gamma_hat[j] =
                std::clamp(ar1_autocorrelation(node_series), -1.0, 1.0);
        } catch (const Error&) {
            report.gamma_hat[j] = 0.0;  // constant series: no autocorrelation signal
        }
        const double baseline =
            slice_variance(std::span<const double>(node_series).first(window));
        report.alarms[j] = baseline < kDegenerateVariance
                               ? report.per_node_variance[j] > 1e-12
                               : report.per_node_variance[j] > alarm.kappa * baseline;
    }
    return report;
}

}  // namespace netcsd
