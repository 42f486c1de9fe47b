#include "aismarkov/aggregate.hpp"

#include "aismarkov/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace aismarkov {

double globalize(std::span<const double> phi, std::span<const double> pi) {
    if (phi.size() != pi.size()) {
        throw DomainError("globalize: metric and distribution sizes differ");
    }
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        mass += pi[i];
        if (pi[i] != 0.0) {
            acc += pi[i] * phi[i];
        }
    }
    if (std::abs(mass - 1.0) > 1e-9) {
        throw DomainError("globalize: stationary distribution is not normalized");
    }
    return acc;
}

double percentile(std::span<const double> sorted, double pct) {
    if (sorted.empty()) {
        throw DomainError("percentile of an empty sample");
    }
    const double h = static_cast<double>(sorted.size() - 1) * pct / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Thresholds fit_thresholds(std::span<const std::vector<double>> distributions, double low_pct, double high_pct) {
    std::vector<double> pool;
    for (const auto& d : distributions) {
        pool.insert(pool.end(), d.begin(), d.end());
    }
    if (pool.empty()) {
        throw DomainError("fit_thresholds: empty distribution");
    }
    std::sort(pool.begin(), pool.end());
    Thresholds t{percentile(pool, low_pct), percentile(pool, high_pct), false};
    t.degenerate = !(t.high > t.low);
    return t;
}

MonotoneSpline::MonotoneSpline(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) {
        throw ConfigError("spline needs at least two knots");
    }
    for (std::size_t k = 1; k < knots_.size(); ++k) {
        if (!(knots_[k].x > knots_[k - 1].x) || !(knots_[k].y > knots_[k - 1].y)) {
            throw ConfigError("spline knots must be strictly increasing in x and y");
        }
    }
    const std::size_t n = knots_.size();
    std::vector<double> h(n - 1), secant(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = knots_[k + 1].x - knots_[k].x;
        secant[k] = (knots_[k + 1].y - knots_[k].y) / h[k];
    }
    slopes_.assign(n, 0.0);
    slopes_.front() = secant.front();
    slopes_.back() = secant.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        // Weighted harmonic mean of neighbouring secants; secants are all
        // positive here, so the interpolant is monotone.
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        slopes_[k] = (w1 + w2) / (w1 / secant[k - 1] + w2 / secant[k]);
    }
}

double MonotoneSpline::operator()(double x) const {
    if (x <= knots_.front().x) {
        return knots_.front().y;
    }
    if (x >= knots_.back().x) {
        return knots_.back().y;
    }
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x, [](double v, const Knot& k) { return v < k.x; });
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const Knot& a = knots_[k];
    const Knot& b = knots_[k + 1];
    const double h = b.x - a.x;
    const double t = (x - a.x) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * a.y + (t3 - 2 * t2 + t) * h * slopes_[k] + (-2 * t3 + 3 * t2) * b.y +
           (t3 - t2) * h * slopes_[k + 1];
}

MonotoneSpline MonotoneSpline::contrast_default() {
    return MonotoneSpline(QuantizationConfig{}.knots);
}

void QuantizationConfig::validate() const {
    if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0)) {
        throw ConfigError("quantization: need 0 <= low < high <= 100");
    }
    MonotoneSpline check(knots);
    if (knots.front().x != 0.0 || knots.front().y != 0.0 || knots.back().x != 1.0 || knots.back().y != 1.0) {
        throw ConfigError("quantization: knots must run from (0,0) to (1,1)");
    }
}

double quantize(double w, const Thresholds& t, const MonotoneSpline& spline) {
    if (t.degenerate) {
        return 0.0;
    }
    const double z = std::clamp((w - t.low) / (t.high - t.low), 0.0, 1.0);
    return std::clamp(spline(z), 0.0, 1.0);
}

GlobalSummary summarize(const std::string& window, VesselCategory category, const MarkovModel& model,
                        const GraphSummary& graph) {
    GlobalSummary s;
    s.window = window;
    s.category = category;
    s.n_states = model.states.size();
    s.n_transitions = model.total_transitions();
    if (graph.path_length) {
        s.avg_path_length = graph.path_length->mean;
        s.excluded_pairs = graph.path_length->excluded_pairs;
    } else if (s.n_states > 1) {
        s.excluded_pairs = static_cast<std::uint64_t>(s.n_states) * (s.n_states - 1);
    }
    s.modularity = graph.modularity;
    s.pi_status = model.stationary_status;
    s.phi = {{"MM", std::nullopt}, {"DTM", std::nullopt}, {"C", std::nullopt}};
    if (model.stationary) {
        const auto& pi = model.stationary->pi;
        std::vector<double> mm(graph.cells.mm.begin(), graph.cells.mm.end());
        std::vector<double> dtm(graph.cells.dtm_s.begin(), graph.cells.dtm_s.end());
        s.phi["MM"] = globalize(mm, pi);
        s.phi["DTM"] = globalize(dtm, pi);
        s.phi["C"] = globalize(graph.cells.betweenness, pi);
    }
    return s;
}

std::string write_summary_json(const GlobalSummary& s) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["window"] = s.window;
    j["category"] = std::string(to_string(s.category));
    j["n_states"] = s.n_states;
    j["n_transitions"] = s.n_transitions;
    j["avg_path_length"] = opt(s.avg_path_length);
    j["modularity"] = opt(s.modularity);
    nlohmann::ordered_json phi = nlohmann::ordered_json::object();
    for (const char* name : {"MM", "DTM", "C"}) {
        auto it = s.phi.find(name);
        phi[name] = it == s.phi.end() ? nlohmann::ordered_json() : opt(it->second);
    }
    j["phi"] = phi;
    j["excluded_pairs"] = s.excluded_pairs;
    j["pi_status"] = s.pi_status;
    return j.dump(2) + "\n";
}

} // namespace aismarkov
