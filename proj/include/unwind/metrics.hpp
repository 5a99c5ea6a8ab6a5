#pragma once

#include "unwind/inflow_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind {

/// Trading metrics of one path. Volumes in ADV%, costs in bps of in-flow
/// total variation.
struct MetricsReport {
    double internalization = 0.0;  ///< 1 - TV(out)/TV(in)
    double regret = 0.0;           ///< 1 - |Q_T|/TV(out); 0 for monotone or empty out-flow
    double impact_bps = 0.0;
    double spread_bps = 0.0;
    double total_bps = 0.0;
    double closing_adv = 0.0;   ///< |J_T| in ADV%
    double closing_frac = 0.0;  ///< |J_T| / TV(out)
    double monotonicity = 0.0;  ///< |Z_T| / TV(Z)
    double inflow_tv = 0.0;     ///< ADV%
    double outflow_tv = 0.0;    ///< ADV%
    /// False when TV(in) = 0 but the path has costs; such reports are left
    /// out of aggregates.
    bool defined = true;
};

/// Names and accessors of the numeric MetricsReport fields, in output order.
struct MetricField {
    const char* name;
    double MetricsReport::*member;
};

inline const std::array<MetricField, 10>& metric_fields() {
    static const std::array<MetricField, 10> fields{{
        {"internalization", &MetricsReport::internalization},
        {"regret", &MetricsReport::regret},
        {"impact_bps", &MetricsReport::impact_bps},
        {"spread_bps", &MetricsReport::spread_bps},
        {"total_bps", &MetricsReport::total_bps},
        {"closing_adv", &MetricsReport::closing_adv},
        {"closing_frac", &MetricsReport::closing_frac},
        {"monotonicity", &MetricsReport::monotonicity},
        {"inflow_tv", &MetricsReport::inflow_tv},
        {"outflow_tv", &MetricsReport::outflow_tv},
    }};
    return fields;
}

inline MetricsReport path_metrics(const PathResult& p) {
    MetricsReport m;
    const double tv_in = p.tv_inflow;
    const double tv_out = p.tv_outflow;

    m.inflow_tv = 100.0 * tv_in;
    m.outflow_tv = 100.0 * tv_out;
    m.closing_adv = 100.0 * std::fabs(p.jt);

    // |Q_T| equals |Z_T| when the day starts from pure in-flow. A monotone
    // out-flow trades exactly |Q_T|; pin its regret to zero rather than leave
    // rounding residue.
    if (tv_out == 0.0 || p.outflow_monotone) {
        m.regret = 0.0;
    } else {
        m.regret = std::clamp(1.0 - std::fabs(p.net_outflow) / tv_out, 0.0, 1.0);
    }
    m.closing_frac = tv_out > 0.0 ? std::fabs(p.jt) / tv_out : 0.0;

    if (tv_in > 0.0) {
        m.internalization = 1.0 - tv_out / tv_in;
        m.impact_bps = 1e4 * p.impact_cost / tv_in;
        m.spread_bps = 1e4 * p.spread_cost / tv_in;
        m.total_bps = m.impact_bps + m.spread_bps;
        m.monotonicity = std::fabs(p.z_terminal) / tv_in;
    } else {
        m.internalization = tv_out == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
        m.monotonicity = 1.0;
        m.defined = p.impact_cost == 0.0 && p.spread_cost == 0.0 && tv_out == 0.0;
    }
    return m;
}

/// Distribution summary of one metric.
struct FieldSummary {
    std::string name;
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
    double se = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::array<double, 5> quantiles{};  ///< at 5%, 25%, 50%, 75%, 95%
    std::vector<std::size_t> histogram;  ///< 100 uniform bins over [min, max]
};

inline constexpr std::array<double, 5> summary_quantile_levels{0.05, 0.25, 0.5, 0.75, 0.95};
inline constexpr std::size_t histogram_bins = 100;

struct AggregateReport {
    std::size_t n_paths = 0;      ///< reports received
    std::size_t n_undefined = 0;  ///< reports left out
    std::vector<FieldSummary> fields;

    const FieldSummary& field(const std::string& name) const {
        for (const auto& f : fields) {
            if (f.name == name) return f;
        }
        throw std::out_of_range("AggregateReport: no field " + name);
    }
};

/// Linear-interpolated quantile of sorted data (type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile_sorted: empty input");
    }
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline FieldSummary summarize(const std::string& name, const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: empty input");
    }
    FieldSummary s;
    s.name = name;
    s.count = values.size();
    const double n = static_cast<double>(values.size());
    // sequential sums in input order keep the result reproducible
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.se = s.std / std::sqrt(n);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    for (std::size_t i = 0; i < s.quantiles.size(); ++i) {
        s.quantiles[i] = quantile_sorted(sorted, summary_quantile_levels[i]);
    }
    s.histogram.assign(histogram_bins, 0);
    const double width = (s.max - s.min) / static_cast<double>(histogram_bins);
    for (double v : values) {
        std::size_t b = 0;
        if (width > 0.0) {
            b = std::min(histogram_bins - 1, static_cast<std::size_t>((v - s.min) / width));
        }
        ++s.histogram[b];
    }
    return s;
}

inline AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) {
        throw std::invalid_argument("aggregate: no reports");
    }
    AggregateReport out;
    out.n_paths = reports.size();
    std::vector<const MetricsReport*> used;
    used.reserve(reports.size());
    for (const auto& r : reports) {
        if (r.defined) {
            used.push_back(&r);
        } else {
            ++out.n_undefined;
        }
    }
    if (used.empty()) {
        throw std::invalid_argument("aggregate: every report is undefined");
    }
    std::vector<double> buf(used.size());
    for (const auto& f : metric_fields()) {
        for (std::size_t i = 0; i < used.size(); ++i) {
            buf[i] = used[i]->*f.member;
        }
        out.fields.push_back(summarize(f.name, buf));
    }
    return out;
}

namespace detail {

/// Average ranks (ties share the mean rank).
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

/// Spearman rank correlation.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("spearman: need two equally sized samples of size >= 2");
    }
    return detail::pearson(detail::ranks(a), detail::ranks(b));
}

}  // namespace unwind
