#include "risklab/sampling.hpp"

#include "risklab/error.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace risklab {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix_step(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x632BE59BD9B4E019ULL + (a << 6) + (a >> 2));
    return splitmix_step(s);
}

std::atomic<unsigned> g_default_threads{0};

} // namespace

CounterRng::CounterRng(const SeedSpec& seed, std::uint64_t trial) {
    std::uint64_t h = mix(seed.master_seed, 0x5EEDULL);
    h = mix(h, seed.stream_id);
    h = mix(h, trial);
    state_ = h;
}

CounterRng::result_type CounterRng::operator()() { return splitmix_step(state_); }

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

// Tabulated radial CDF of the restricted Gaussian, F(rho) proportional to
// int_0^rho exp(-s^2/2) s^{d-1} ds on [0, r].
class RadialTable {
public:
    RadialTable(int dimension, double radius) : radius_(radius) {
        constexpr int nodes = 1 << 14;
        cdf_.resize(nodes);
        const double h = radius / (nodes - 1);
        const double dm1 = dimension - 1.0;
        // log-density peak on [0, r] for scaling
        const double peak_rho = std::min(radius, std::sqrt(std::max(dm1, 0.0)));
        auto log_density = [&](double rho) {
            if (rho <= 0.0)
                return dm1 == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
            return dm1 * std::log(rho) - 0.5 * rho * rho;
        };
        const double log_peak = log_density(peak_rho);
        auto density = [&](double rho) { return std::exp(log_density(rho) - log_peak); };
        // 4-point Gauss-Legendre on each cell
        static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                         0.8611363115940526};
        static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374538};
        cdf_[0] = 0.0;
        for (int k = 1; k < nodes; ++k) {
            const double a = (k - 1) * h;
            double cell = 0.0;
            for (int q = 0; q < 4; ++q)
                cell += gw[q] * density(a + 0.5 * h * (gx[q] + 1.0));
            cdf_[static_cast<std::size_t>(k)] = cdf_[static_cast<std::size_t>(k - 1)] + 0.5 * h * cell;
        }
        const double total = cdf_.back();
        require(total > 0.0 && std::isfinite(total), "radial table: degenerate normalization");
        for (double& v : cdf_)
            v /= total;
        step_ = h;
    }

    double invert(double u) const {
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin())
            return 0.0;
        if (it == cdf_.end())
            return radius_;
        const auto k = static_cast<std::size_t>(it - cdf_.begin());
        const double lo = cdf_[k - 1];
        const double hi = cdf_[k];
        const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.0;
        return std::min(radius_, ((static_cast<double>(k) - 1.0) + frac) * step_);
    }

private:
    std::vector<double> cdf_;
    double radius_;
    double step_ = 0.0;
};

namespace {

void draw_direction(CounterRng& rng, int dimension, Vec& out) {
    std::normal_distribution<double> normal;
    out.resize(dimension);
    double norm2 = 0.0;
    do {
        for (int k = 0; k < dimension; ++k)
            out(k) = normal(rng);
        norm2 = out.squaredNorm();
    } while (norm2 == 0.0);
    out /= std::sqrt(norm2);
}

} // namespace

void draw_uniform_ball(CounterRng& rng, int dimension, double radius, Vec& out) {
    require(dimension >= 1, "uniform ball: dimension must be >= 1");
    require(radius > 0.0, "uniform ball: radius must be positive");
    for (;;) {
        draw_direction(rng, dimension, out);
        const double scale = radius * std::pow(rng.uniform(), 1.0 / dimension);
        out *= scale;
        if (out.norm() < radius)
            return;
    }
}

void draw_uniform_simplex(CounterRng& rng, int dimension, Vec& out) {
    require(dimension >= 2, "uniform simplex: dimension must be >= 2");
    std::exponential_distribution<double> expo(1.0);
    out.resize(dimension);
    for (int k = 0; k < dimension; ++k)
        out(k) = expo(rng);
    out /= out.sum();
}

PerturbationLaw PerturbationLaw::uniform_ball(int dimension, double radius) {
    require(dimension >= 1, "perturbation law: dimension must be >= 1");
    require(radius > 0.0, "perturbation law: radius must be positive");
    PerturbationLaw law;
    law.kind_ = LawKind::uniform_ball;
    law.dimension_ = dimension;
    law.radius_ = radius;
    return law;
}

PerturbationLaw PerturbationLaw::restricted_gaussian(int dimension, double radius, GaussianMode mode) {
    require(dimension >= 1, "perturbation law: dimension must be >= 1");
    require(radius > 0.0, "perturbation law: radius must be positive");
    PerturbationLaw law;
    law.kind_ = LawKind::restricted_gaussian;
    law.dimension_ = dimension;
    law.radius_ = radius;
    law.kappa_ = gaussian_kappa_ratio(dimension, radius);
    law.acceptance_ = boost::math::gamma_p(0.5 * dimension, 0.5 * radius * radius);
    if (mode == GaussianMode::automatic)
        mode = law.acceptance_ >= 1e-3 ? GaussianMode::rejection : GaussianMode::radial_inverse_cdf;
    if (mode == GaussianMode::rejection && law.acceptance_ < 1e-6) {
        std::ostringstream msg;
        msg << "restricted gaussian: rejection acceptance " << law.acceptance_
            << " below 1e-6; use radial inverse-CDF mode";
        throw Error(msg.str());
    }
    law.mode_ = mode;
    if (mode == GaussianMode::radial_inverse_cdf)
        law.table_ = std::make_shared<const RadialTable>(dimension, radius);
    return law;
}

void PerturbationLaw::draw(CounterRng& rng, Vec& out) const {
    if (kind_ == LawKind::uniform_ball) {
        draw_uniform_ball(rng, dimension_, radius_, out);
        return;
    }
    if (mode_ == GaussianMode::rejection) {
        std::normal_distribution<double> normal;
        out.resize(dimension_);
        const double r2 = radius_ * radius_;
        for (;;) {
            for (int k = 0; k < dimension_; ++k)
                out(k) = normal(rng);
            if (out.squaredNorm() <= r2)
                return;
        }
    }
    draw_direction(rng, dimension_, out);
    out *= table_->invert(rng.uniform());
}

Eigen::MatrixXd sample_uniform_ball(int dimension, double radius, const SeedSpec& seed, std::size_t n) {
    require(dimension >= 1, "uniform ball: dimension must be >= 1");
    require(n >= 1, "uniform ball: n must be >= 1");
    Eigen::MatrixXd points(dimension, static_cast<Eigen::Index>(n));
    Vec z;
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        draw_uniform_ball(rng, dimension, radius, z);
        points.col(static_cast<Eigen::Index>(i)) = z;
    }
    return points;
}

GaussianSample sample_restricted_gaussian(int dimension, double radius, const SeedSpec& seed, std::size_t n,
                                          GaussianMode mode) {
    require(n >= 1, "restricted gaussian: n must be >= 1");
    const auto law = PerturbationLaw::restricted_gaussian(dimension, radius, mode);
    GaussianSample sample;
    sample.acceptance_probability = law.acceptance_probability();
    sample.mode_used = law.mode();
    sample.points.resize(dimension, static_cast<Eigen::Index>(n));
    Vec z;
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        law.draw(rng, z);
        sample.points.col(static_cast<Eigen::Index>(i)) = z;
    }
    return sample;
}

Eigen::MatrixXd sample_uniform_simplex(int dimension, const SeedSpec& seed, std::size_t n) {
    require(dimension >= 2, "uniform simplex: dimension must be >= 2");
    Eigen::MatrixXd points(dimension, static_cast<Eigen::Index>(n));
    Vec mu;
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        draw_uniform_simplex(rng, dimension, mu);
        points.col(static_cast<Eigen::Index>(i)) = mu;
    }
    return points;
}

double gaussian_kappa_ratio(int dimension, double radius) {
    require(dimension >= 1, "kappa ratio: dimension must be >= 1");
    require(radius > 0.0, "kappa ratio: radius must be positive");
    // With rho = r t^(1/d): ratio = 1 / int_0^1 exp(-r^2 t^(2/d) / 2) dt. The
    // integrand is monotone and bounded, unlike rho^(d-1) which peaks at the
    // boundary for large d.
    const double r2 = radius * radius;
    const double power = 2.0 / dimension;
    auto integrand = [&](double t) { return std::exp(-0.5 * r2 * std::pow(t, power)); };
    // t^(2/d) has an unbounded slope at 0, which tanh-sinh tolerates
    boost::math::quadrature::tanh_sinh<double> rule;
    double error = 0.0;
    const double integral = rule.integrate(integrand, 0.0, 1.0, 1e-12, &error);
    if (!(integral > 0.0) || !std::isfinite(integral) || error > 1e-10 * integral)
        throw ConvergenceError("kappa ratio: quadrature failed", integral, error);
    return 1.0 / integral;
}

std::pair<double, double> binomial_interval(std::uint64_t hits, std::uint64_t trials, IntervalMethod method) {
    require(trials > 0, "binomial interval: no trials");
    require(hits <= trials, "binomial interval: hits exceed trials");
    const double n = static_cast<double>(trials);
    const double k = static_cast<double>(hits);
    if (method == IntervalMethod::clopper_pearson) {
        const double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, 0.025);
        const double hi = hits == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 0.975);
        return {lo, hi};
    }
    const double z2 = kZ95 * kZ95;
    // the general formula leaves rounding residue at the endpoints
    if (hits == 0)
        return {0.0, z2 / (n + z2)};
    if (hits == trials)
        return {n / (n + z2), 1.0};
    const double p = k / n;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double MCEstimate::standard_error() const {
    if (trials == 0)
        return 0.0;
    const double p = p_hat();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

unsigned default_threads() {
    const unsigned t = g_default_threads.load();
    if (t != 0)
        return t;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned threads) { g_default_threads.store(threads); }

std::vector<std::uint64_t> parallel_count_events(std::uint64_t first, std::uint64_t n, unsigned threads,
                                                 std::size_t events,
                                                 const std::function<std::uint32_t(std::uint64_t)>& trial) {
    require(events >= 1 && events <= 32, "parallel count: 1 to 32 events");
    if (threads == 0)
        threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n, 1)));
    auto run = [&](std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t>& counts) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            const std::uint32_t mask = trial(i);
            for (std::size_t k = 0; k < events; ++k)
                counts[k] += (mask >> k) & 1u;
        }
    };
    std::vector<std::uint64_t> total(events, 0);
    if (threads <= 1) {
        run(first, first + n, total);
        return total;
    }
    std::vector<std::vector<std::uint64_t>> counts(threads, std::vector<std::uint64_t>(events, 0));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        const std::uint64_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t lo = std::min(first + n, first + t * chunk);
            const std::uint64_t hi = std::min(first + n, lo + chunk);
            workers.emplace_back([&, t, lo, hi] {
                try {
                    run(lo, hi, counts[t]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            });
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    for (const auto& c : counts)
        for (std::size_t k = 0; k < events; ++k)
            total[k] += c[k];
    return total;
}

std::uint64_t parallel_count(std::uint64_t first, std::uint64_t n, unsigned threads,
                             const std::function<bool(std::uint64_t)>& trial) {
    return parallel_count_events(first, n, threads, 1,
                                 [&](std::uint64_t i) { return trial(i) ? 1u : 0u; })[0];
}

MCEstimate mc_probability(const Event& event, const PerturbationLaw& law, const SeedSpec& seed, std::size_t n,
                          unsigned threads, std::uint64_t first_trial) {
    require(n >= 100, "mc_probability: n must be >= 100");
    MCEstimate est;
    est.trials = n;
    est.hits = parallel_count(first_trial, n, threads, [&](std::uint64_t i) {
        CounterRng rng(seed, i);
        thread_local Vec z;
        law.draw(rng, z);
        try {
            return event(z);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "event predicate failed on trial " << i << " sample [" << z.transpose() << "]: " << e.what();
            throw Error(msg.str());
        }
    });
    return est;
}

} // namespace risklab
