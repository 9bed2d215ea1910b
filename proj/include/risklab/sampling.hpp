#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace risklab {

using Vec = Eigen::VectorXd;

/// Identifies a reproducible family of random streams. Trial `i` of a
/// (master_seed, stream_id) pair always sees the same numbers, whichever
/// thread runs it.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

/// Counter-based generator: SplitMix64 started from a hash of
/// (master_seed, stream_id, trial).
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(const SeedSpec& seed, std::uint64_t trial);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

enum class LawKind { uniform_ball, restricted_gaussian };

/// How restricted-Gaussian draws are produced.
enum class GaussianMode { automatic, rejection, radial_inverse_cdf };

class RadialTable;

/// A perturbation law in the bounded-density class on B(r).
class PerturbationLaw {
public:
    static PerturbationLaw uniform_ball(int dimension, double radius);
    static PerturbationLaw restricted_gaussian(int dimension, double radius,
                                               GaussianMode mode = GaussianMode::automatic);

    LawKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    double radius() const { return radius_; }
    /// Supremum of the density ratio to the uniform law on B(r).
    double kappa() const { return kappa_; }
    /// P(|Z| <= r) for an unrestricted standard Gaussian; 1 for the uniform law.
    double acceptance_probability() const { return acceptance_; }
    GaussianMode mode() const { return mode_; }

    /// Draws one sample into `out` (resized to the dimension).
    void draw(CounterRng& rng, Vec& out) const;

private:
    PerturbationLaw() = default;

    LawKind kind_ = LawKind::uniform_ball;
    int dimension_ = 1;
    double radius_ = 1.0;
    double kappa_ = 1.0;
    double acceptance_ = 1.0;
    GaussianMode mode_ = GaussianMode::automatic;
    std::shared_ptr<const RadialTable> table_;
};

void draw_uniform_ball(CounterRng& rng, int dimension, double radius, Vec& out);
void draw_uniform_simplex(CounterRng& rng, int dimension, Vec& out);

/// `n` i.i.d. points uniform on the open ball of radius r, one per column.
Eigen::MatrixXd sample_uniform_ball(int dimension, double radius, const SeedSpec& seed, std::size_t n);

struct GaussianSample {
    Eigen::MatrixXd points;
    double acceptance_probability = 1.0;
    GaussianMode mode_used = GaussianMode::rejection;
};

/// Standard Gaussian conditioned on |z| <= r.
GaussianSample sample_restricted_gaussian(int dimension, double radius, const SeedSpec& seed,
                                          std::size_t n, GaussianMode mode = GaussianMode::automatic);

/// Uniform points on the probability simplex, one per column.
Eigen::MatrixXd sample_uniform_simplex(int dimension, const SeedSpec& seed, std::size_t n);

/// int_0^r rho^{d-1} d rho / int_0^r exp(-rho^2/2) rho^{d-1} d rho, by adaptive
/// Gauss-Kronrod quadrature. This is the sup of the restricted-Gaussian density
/// relative to the uniform law on B(r).
double gaussian_kappa_ratio(int dimension, double radius);

enum class IntervalMethod { wilson, clopper_pearson };

/// 95% binomial confidence interval for hits/trials.
std::pair<double, double> binomial_interval(std::uint64_t hits, std::uint64_t trials,
                                            IntervalMethod method = IntervalMethod::wilson);

/// Hit counts of a Monte Carlo event with a 95% interval.
struct MCEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;

    double p_hat() const { return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials); }
    double standard_error() const;
    std::pair<double, double> interval(IntervalMethod method = IntervalMethod::wilson) const {
        return binomial_interval(hits, trials, method);
    }
    double ci_lo() const { return interval().first; }
    double ci_hi() const { return interval().second; }

    /// Merges estimates over disjoint trial sets.
    MCEstimate& operator+=(const MCEstimate& other) {
        hits += other.hits;
        trials += other.trials;
        return *this;
    }
};

inline MCEstimate operator+(MCEstimate a, const MCEstimate& b) { return a += b; }

/// Number of worker threads used when a caller passes 0.
unsigned default_threads();
void set_default_threads(unsigned threads);

/// Evaluates `trial(i)` for i in [first, first + n) across threads and counts
/// true results. Chunking never changes the count.
std::uint64_t parallel_count(std::uint64_t first, std::uint64_t n, unsigned threads,
                             const std::function<bool(std::uint64_t)>& trial);

/// Counts several events on shared trials. `trial(i)` returns a bit mask;
/// bit k set means event k occurred. At most 32 events.
std::vector<std::uint64_t> parallel_count_events(std::uint64_t first, std::uint64_t n, unsigned threads,
                                                 std::size_t events,
                                                 const std::function<std::uint32_t(std::uint64_t)>& trial);

using Event = std::function<bool(const Vec&)>;

/// Probability of `event` under `law`, from trials [first_trial, first_trial + n).
MCEstimate mc_probability(const Event& event, const PerturbationLaw& law, const SeedSpec& seed,
                          std::size_t n, unsigned threads = 0, std::uint64_t first_trial = 0);

} // namespace risklab
