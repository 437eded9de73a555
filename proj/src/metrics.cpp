#include "gfad/metrics.hpp"

#include "gfad/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gfad {

std::optional<double> ConfusionCounts::p_md() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(fn) / static_cast<double>(tp + fn);
}

std::optional<double> ConfusionCounts::p_fa() const {
    if (fp + tn == 0) return std::nullopt;
    return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

std::optional<double> ConfusionCounts::p_d() const {
    const auto md = p_md();
    if (!md) return std::nullopt;
    return 1.0 - *md;
}

double ConfusionCounts::accuracy() const {
    if (total() == 0) return 0.0;
    return static_cast<double>(tp + tn) / static_cast<double>(total());
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

ConfusionCounts confusion(std::span<const std::uint8_t> decisions, std::span<const std::uint8_t> truth) {
    if (decisions.size() != truth.size()) throw MismatchError("confusion: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool d = decisions[i] != 0;
        if (truth[i] != 0)
            (d ? c.tp : c.fn)++;
        else
            (d ? c.fp : c.tn)++;
    }
    return c;
}

void ScorePool::add(std::span<const double> s, std::span<const std::uint8_t> t) {
    if (s.size() != t.size()) throw MismatchError("score pool: length mismatch");
    scores.insert(scores.end(), s.begin(), s.end());
    truth.insert(truth.end(), t.begin(), t.end());
}

std::uint64_t ScorePool::positives() const {
    return static_cast<std::uint64_t>(std::count_if(truth.begin(), truth.end(), [](auto v) { return v != 0; }));
}

double RocCurve::best_accuracy() const {
    const double n = static_cast<double>(positives + negatives);
    double best = 0.0;
    for (const auto& p : points)
        best = std::max(best, (p.p_d * static_cast<double>(positives) + (1.0 - p.p_fa) * static_cast<double>(negatives)) / n);
    return best;
}

double RocCurve::best_accuracy_tau() const {
    double best = -1.0, tau = 0.0;
    for (const auto& p : points) {
        const double acc = p.p_d * static_cast<double>(positives) + (1.0 - p.p_fa) * static_cast<double>(negatives);
        if (acc > best) {
            best = acc;
            tau = p.tau;
        }
    }
    return tau;
}

double trapezoid_auc(std::vector<RocPoint> points) {
    std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.p_fa != b.p_fa ? a.p_fa < b.p_fa : a.p_d < b.p_d;
    });
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].p_fa - points[i - 1].p_fa) * 0.5 * (points[i].p_d + points[i - 1].p_d);
    return area;
}

namespace {

struct SortedPool {
    std::vector<double> pos, neg;
};

SortedPool split_sorted(const ScorePool& pool) {
    SortedPool s;
    for (std::size_t i = 0; i < pool.size(); ++i) (pool.truth[i] ? s.pos : s.neg).push_back(pool.scores[i]);
    if (s.pos.empty() || s.neg.empty()) throw DomainError("roc: both active and inactive samples are required");
    std::sort(s.pos.begin(), s.pos.end());
    std::sort(s.neg.begin(), s.neg.end());
    return s;
}

RocPoint point_at(const SortedPool& s, double tau) {
    const auto above = [tau](const std::vector<double>& v) {
        return static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), tau)) / static_cast<double>(v.size());
    };
    return {tau, above(s.neg), above(s.pos)};
}

RocCurve finish(const SortedPool& s, std::vector<RocPoint> pts) {
    RocCurve c;
    c.points = std::move(pts);
    c.positives = s.pos.size();
    c.negatives = s.neg.size();
    c.auc = trapezoid_auc(c.points);
    return c;
}

} // namespace

RocCurve roc_sweep(const ScorePool& pool, int num_taus, double delta) {
    if (num_taus < 2) throw ConfigError("roc: at least two thresholds are required");
    const SortedPool s = split_sorted(pool);
    std::vector<RocPoint> pts;
    pts.reserve(static_cast<std::size_t>(num_taus));
    for (int i = 0; i < num_taus; ++i)
        pts.push_back(point_at(s, (1.0 + delta) * static_cast<double>(i) / static_cast<double>(num_taus - 1)));
    return finish(s, std::move(pts));
}

RocCurve roc_exact(const ScorePool& pool) {
    const SortedPool s = split_sorted(pool);
    std::vector<double> taus(pool.scores);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    std::vector<RocPoint> pts;
    pts.reserve(taus.size() + 2);
    pts.push_back(point_at(s, std::min(0.0, taus.front())));
    for (double t : taus) pts.push_back(point_at(s, t));
    pts.push_back(point_at(s, std::nextafter(taus.back(), std::numeric_limits<double>::infinity())));
    return finish(s, std::move(pts));
}

std::vector<double> rank_normalize(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> out(n, 0.5);
    if (n < 2) return out;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && values[idx[j]] == values[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j - 1);
        for (std::size_t r = i; r < j; ++r) out[idx[r]] = avg_rank / static_cast<double>(n - 1);
        i = j;
    }
    return out;
}

double SnrCdf::at(double x) const {
    if (snr_db.empty()) return 0.0;
    const auto it = std::upper_bound(snr_db.begin(), snr_db.end(), x);
    return static_cast<double>(it - snr_db.begin()) / static_cast<double>(snr_db.size());
}

SnrCdf snr_cdf(const LargeScaleMap& lsf, const std::vector<double>& tx_power_w, double noise_var_w,
               double coverage_fraction) {
    const SnrReport rep = dominant_ap_snr(lsf, tx_power_w, noise_var_w, coverage_fraction);
    SnrCdf out;
    out.snr_db = rep.snr_db;
    std::sort(out.snr_db.begin(), out.snr_db.end());
    const auto n = static_cast<double>(out.snr_db.size());
    for (std::size_t i = 0; i < out.snr_db.size(); ++i) out.cdf.push_back(static_cast<double>(i + 1) / n);
    out.target_db = rep.target_db;
    return out;
}

} // namespace gfad
