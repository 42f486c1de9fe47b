#pragma once

#include "aismarkov/ais_ingest.hpp"
#include "aismarkov/graph_metrics.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aismarkov {

/// Phi = sum_i pi_i * phi_i, summed in index order. Throws DomainError when
/// pi does not sum to 1 within 1e-9 or the spans differ in length.
double globalize(std::span<const double> phi, std::span<const double> pi);

/// Linear-interpolation order statistic: h = (N - 1) p / 100 on the sorted
/// sample. `sorted` must be ascending and non-empty.
double percentile(std::span<const double> sorted, double pct);

struct Thresholds {
    double low = 0.0;
    double high = 0.0;
    bool degenerate = false;  ///< low == high, quantize maps everything to 0
};

/// Pools every window's distribution for one vessel type and takes the
/// configured percentiles. Throws DomainError if the pool is empty.
Thresholds fit_thresholds(std::span<const std::vector<double>> distributions, double low_pct = 1.0,
                          double high_pct = 98.0);

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson)
/// through strictly increasing knots; monotone between knots, exact at them.
class MonotoneSpline {
public:
    struct Knot {
        double x;
        double y;
    };

    /// Throws ConfigError unless there are >= 2 knots strictly increasing in
    /// both coordinates.
    explicit MonotoneSpline(std::vector<Knot> knots);

    double operator()(double x) const;
    std::span<const Knot> knots() const { return knots_; }

    /// (0,0) (0.25,0.45) (0.5,0.70) (0.75,0.88) (1,1): lifts low and mid values.
    static MonotoneSpline contrast_default();

private:
    std::vector<Knot> knots_;
    std::vector<double> slopes_;
};

struct QuantizationConfig {
    double low_pct = 1.0;
    double high_pct = 98.0;
    std::vector<MonotoneSpline::Knot> knots = {{0.0, 0.0}, {0.25, 0.45}, {0.5, 0.70}, {0.75, 0.88}, {1.0, 1.0}};

    /// Throws ConfigError.
    void validate() const;
};

/// spline(clamp((w - low) / (high - low), 0, 1)); 0 for degenerate thresholds.
double quantize(double w, const Thresholds& t, const MonotoneSpline& spline);

/// Scalars for one category x window.
struct GlobalSummary {
    std::string window;
    VesselCategory category = VesselCategory::All;
    std::size_t n_states = 0;
    std::uint64_t n_transitions = 0;
    std::optional<double> avg_path_length;
    std::optional<double> modularity;
    std::uint64_t excluded_pairs = 0;
    /// Metric name -> Phi; empty optional when no stationary distribution exists.
    std::map<std::string, std::optional<double>> phi;
    std::string pi_status = "ok";
};

GlobalSummary summarize(const std::string& window, VesselCategory category, const MarkovModel& model,
                        const GraphSummary& graph);

/// `{window, category, n_states, n_transitions, avg_path_length, modularity,
/// phi: {MM, DTM, C}, excluded_pairs, pi_status}`; nulls where undefined.
std::string write_summary_json(const GlobalSummary& summary);

} // namespace aismarkov
