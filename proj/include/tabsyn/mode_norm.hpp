#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabsyn/errors.hpp"
#include "tabsyn/rng.hpp"
#include "tabsyn/table.hpp"

namespace tabsyn {

struct GaussMode {
    double weight = 0.0;  // posterior mixture weight, may sum to < 1 after pruning
    double mean = 0.0;
    double stddev = 0.0;
};

// Per-column Gaussian mixture from the variational fit. Weights are the
// surviving posterior weights; they are renormalized only when sampling.
class ColumnModeModel {
public:
    explicit ColumnModeModel(std::vector<GaussMode> modes) : modes_(std::move(modes)) {
        if (modes_.empty()) throw Error("ColumnModeModel: no modes");
        double total = 0.0;
        for (const GaussMode& m : modes_) {
            if (!(m.stddev > 0.0)) throw Error("ColumnModeModel: non-positive stddev");
            if (!(m.weight > 0.0)) throw Error("ColumnModeModel: non-positive weight");
            total += m.weight;
        }
        if (total > 1.0 + 1e-9) throw Error("ColumnModeModel: weights sum to > 1");
    }

    const std::vector<GaussMode>& modes() const { return modes_; }
    std::size_t mode_count() const { return modes_.size(); }

private:
    std::vector<GaussMode> modes_;
};

struct VgmFitOptions {
    double weight_floor = 0.005;  // components below this posterior weight are pruned
    int max_iterations = 1000;
    double elbo_tolerance = 1e-4;
};

namespace detail {

// Digamma via the downward recurrence and the asymptotic series; accurate to
// ~1e-12 for the positive arguments the fit produces.
inline double digamma(double x) {
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
    return result;
}

inline double log_gauss_pdf(double x, double mean, double stddev) {
    const double z = (x - mean) / stddev;
    return -0.5 * z * z - std::log(stddev) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace detail

// Variational-Bayes EM for a one-dimensional Gaussian mixture, truncated at
// k_max components with a symmetric Dirichlet weight prior (concentration
// 1/k_max) and a Normal-Gamma prior per component. The Dirichlet prior
// drains redundant components, so the number of surviving modes is inferred
// rather than fixed. Fitting runs on standardized values; the returned modes
// are mapped back to the data scale.
inline ColumnModeModel fit_vgm(std::span<const double> values, int k_max, std::uint64_t seed,
                               const VgmFitOptions& options = {}) {
    if (k_max < 1) throw Error("fit_vgm: k_max must be >= 1");
    const std::size_t n = values.size();
    {
        std::set<double> distinct(values.begin(), values.end());
        if (distinct.size() < 2)
            throw DegenerateColumn("fit_vgm: needs at least 2 distinct values");
    }

    // standardize
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double scale = std::sqrt(var);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (values[i] - mean) / scale;

    const std::size_t k = static_cast<std::size_t>(k_max);
    const double alpha0 = 1.0 / static_cast<double>(k_max);  // Dirichlet concentration
    const double beta0 = 1.0;                                // mean precision scale
    const double m0 = 0.0;                                   // prior mean (standardized)
    const double a0 = 1.0;                                   // Gamma shape
    const double b0 = 1.0;                                   // Gamma rate

    // k-means++-style seeding of the initial component means, then a hard
    // nearest-mean assignment provides the first responsibilities.
    Rng rng(seed);
    std::vector<double> centers;
    centers.push_back(x[rng.below(n)]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(x[rng.below(n)]);
            continue;
        }
        double target = rng.uniform() * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            target -= d2[i];
            if (target <= 0.0) {
                pick = i;
                break;
            }
        }
        centers.push_back(x[pick]);
    }

    std::vector<double> resp(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < k; ++j)
            if (std::abs(x[i] - centers[j]) < std::abs(x[i] - centers[best])) best = j;
        resp[i * k + best] = 1.0;
    }

    // variational posterior parameters
    std::vector<double> alpha(k), beta(k), m(k), a(k), b(k);
    std::vector<double> nk(k), xbar(k), sk(k);

    auto m_step = [&]() {
        for (std::size_t j = 0; j < k; ++j) {
            double w = 0.0, wx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w += resp[i * k + j];
                wx += resp[i * k + j] * x[i];
            }
            nk[j] = w;
            xbar[j] = w > 1e-12 ? wx / w : m0;
            double wss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = x[i] - xbar[j];
                wss += resp[i * k + j] * d * d;
            }
            sk[j] = w > 1e-12 ? wss / w : 0.0;

            alpha[j] = alpha0 + nk[j];
            beta[j] = beta0 + nk[j];
            m[j] = (beta0 * m0 + nk[j] * xbar[j]) / beta[j];
            a[j] = a0 + 0.5 * nk[j];
            b[j] = b0 + 0.5 * (nk[j] * sk[j] +
                               beta0 * nk[j] / (beta0 + nk[j]) * (xbar[j] - m0) * (xbar[j] - m0));
        }
    };

    std::vector<double> eln_pi(k), eln_lambda(k);
    double entropy_z = 0.0;

    auto e_step = [&]() {
        const double alpha_sum = [&] {
            double s = 0.0;
            for (double v : alpha) s += v;
            return s;
        }();
        const double psi_alpha_sum = detail::digamma(alpha_sum);
        for (std::size_t j = 0; j < k; ++j) {
            eln_pi[j] = detail::digamma(alpha[j]) - psi_alpha_sum;
            eln_lambda[j] = detail::digamma(a[j]) - std::log(b[j]);
        }
        entropy_z = 0.0;
        std::vector<double> logr(k);
        for (std::size_t i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double dev = x[i] - m[j];
                logr[j] = eln_pi[j] + 0.5 * eln_lambda[j] -
                          0.5 * std::log(2.0 * std::numbers::pi) -
                          0.5 * (1.0 / beta[j] + a[j] / b[j] * dev * dev);
                mx = std::max(mx, logr[j]);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                logr[j] = std::exp(logr[j] - mx);
                sum += logr[j];
            }
            for (std::size_t j = 0; j < k; ++j) {
                const double r = logr[j] / sum;
                resp[i * k + j] = r;
                if (r > 1e-300) entropy_z -= r * std::log(r);
            }
        }
    };

    // Evidence lower bound; the standard seven-term decomposition for a
    // Dirichlet + Normal-Gamma mixture, specialised to one dimension.
    auto elbo = [&]() {
        const double ln2pi = std::log(2.0 * std::numbers::pi);
        double alpha_sum = 0.0;
        for (double v : alpha) alpha_sum += v;

        double term_x = 0.0, term_z = 0.0, prior_pi = 0.0, prior_ml = 0.0;
        double q_pi = 0.0, q_ml = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double elambda = a[j] / b[j];
            term_x += 0.5 * nk[j] *
                      (eln_lambda[j] - ln2pi - elambda * sk[j] -
                       elambda * (xbar[j] - m[j]) * (xbar[j] - m[j]) - 1.0 / beta[j]);
            term_z += nk[j] * eln_pi[j];
            prior_pi += (alpha0 - 1.0) * eln_pi[j];
            prior_ml += 0.5 * (std::log(beta0 / (2.0 * std::numbers::pi)) + eln_lambda[j] -
                               beta0 * (1.0 / beta[j] + elambda * (m[j] - m0) * (m[j] - m0)));
            prior_ml += a0 * std::log(b0) - std::lgamma(a0) + (a0 - 1.0) * eln_lambda[j] -
                        b0 * elambda;
            q_pi += (alpha[j] - 1.0) * eln_pi[j] - std::lgamma(alpha[j]);
            q_ml += 0.5 * (std::log(beta[j] / (2.0 * std::numbers::pi)) + eln_lambda[j] - 1.0);
            q_ml += std::log(b[j]) - std::lgamma(a[j]) + (a[j] - 1.0) * detail::digamma(a[j]) -
                    a[j];
        }
        prior_pi += std::lgamma(static_cast<double>(k) * alpha0) -
                    static_cast<double>(k) * std::lgamma(alpha0);
        q_pi += std::lgamma(alpha_sum);
        return term_x + term_z + prior_pi + prior_ml + entropy_z - q_pi - q_ml;
    };

    m_step();
    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        e_step();
        m_step();
        const double current = elbo();
        if (std::abs(current - prev) < options.elbo_tolerance) break;
        prev = current;
    }

    // prune and map back to the data scale
    double alpha_sum = 0.0;
    for (double v : alpha) alpha_sum += v;
    std::vector<GaussMode> modes;
    for (std::size_t j = 0; j < k; ++j) {
        const double weight = alpha[j] / alpha_sum;
        if (weight < options.weight_floor) continue;
        GaussMode gm;
        gm.weight = weight;
        gm.mean = m[j] * scale + mean;
        gm.stddev = std::sqrt(b[j] / a[j]) * scale;
        modes.push_back(gm);
    }
    std::sort(modes.begin(), modes.end(),
              [](const GaussMode& l, const GaussMode& r) { return l.mean < r.mean; });
    return ColumnModeModel(std::move(modes));
}

// Unnormalized responsibilities of each mode for one value (the densities
// weighted by the mode weights). Any positive rescaling leaves the induced
// sampling distribution unchanged.
inline std::vector<double> mode_probabilities(const ColumnModeModel& model, double value) {
    std::vector<double> rho;
    rho.reserve(model.mode_count());
    for (const GaussMode& m : model.modes())
        rho.push_back(m.weight * std::exp(detail::log_gauss_pdf(value, m.mean, m.stddev)));
    return rho;
}

struct EncodedValue {
    double alpha = 0.0;
    std::vector<double> beta;  // one-hot over modes when produced by encoding
};

// Samples a mode with probability proportional to its responsibility and
// normalizes the value within it: alpha = (c - mean_k) / (4 stddev_k),
// clamped to [-1, 1] to match the generator's tanh range. When every
// density underflows, the nearest-mean mode is used.
inline EncodedValue encode_value(const ColumnModeModel& model, double value, Rng& rng) {
    const std::vector<double> rho = mode_probabilities(model, value);
    double total = 0.0;
    for (double r : rho) total += r;

    std::size_t pick = 0;
    if (total > 0.0) {
        double target = rng.uniform() * total;
        for (std::size_t j = 0; j < rho.size(); ++j) {
            target -= rho[j];
            if (target <= 0.0) {
                pick = j;
                break;
            }
            pick = j;
        }
    } else {
        for (std::size_t j = 1; j < model.mode_count(); ++j)
            if (std::abs(value - model.modes()[j].mean) <
                std::abs(value - model.modes()[pick].mean))
                pick = j;
    }

    EncodedValue out;
    const GaussMode& m = model.modes()[pick];
    out.alpha = std::clamp((value - m.mean) / (4.0 * m.stddev), -1.0, 1.0);
    out.beta.assign(model.mode_count(), 0.0);
    out.beta[pick] = 1.0;
    return out;
}

// Inverse transform: alpha * 4 stddev_k + mean_k with k = argmax beta, so
// relaxed (simplex-valued) mode indicators from the generator decode too.
inline double decode_value(const ColumnModeModel& model, double alpha,
                           std::span<const double> beta) {
    if (beta.size() != model.mode_count())
        throw LayoutMismatch("decode_value: beta width " + std::to_string(beta.size()) +
                             " vs " + std::to_string(model.mode_count()) + " modes");
    std::size_t pick = 0;
    for (std::size_t j = 1; j < beta.size(); ++j)
        if (beta[j] > beta[pick]) pick = j;
    const GaussMode& m = model.modes()[pick];
    return alpha * 4.0 * m.stddev + m.mean;
}

inline double decode_value(const ColumnModeModel& model, const EncodedValue& enc) {
    return decode_value(model, enc.alpha, enc.beta);
}

// Transform for one continuous column: a fitted mixture, or a constant
// passthrough for degenerate single-valued columns (which contribute no
// encoded dimensions and are copied verbatim into decoded rows).
struct ColumnTransform {
    std::optional<ColumnModeModel> model;
    double constant = 0.0;

    bool is_constant() const { return !model.has_value(); }
    std::size_t encoded_width() const { return is_constant() ? 0 : 1 + model->mode_count(); }
};

// Fits one transform per continuous column of the table, in schema order of
// the continuous columns. Column i is fitted from an independent seeded
// stream so the result does not depend on fitting order.
inline std::vector<ColumnTransform> fit_column_transforms(const DataTable& table, int k_max,
                                                          std::uint64_t seed,
                                                          const VgmFitOptions& options = {}) {
    if (table.n_rows() == 0) throw EmptyTable("fit_column_transforms: empty table");
    std::vector<ColumnTransform> transforms;
    const Rng base(seed);
    std::size_t cont = 0;
    for (std::size_t j = 0; j < table.schema().size(); ++j) {
        if (table.schema().column(j).kind != ColumnKind::Continuous) continue;
        const std::vector<double> values = table.column_values(j);
        ColumnTransform t;
        try {
            Rng fork = base.fork(cont);
            t.model = fit_vgm(values, k_max, fork.next_u64(), options);
        } catch (const DegenerateColumn&) {
            t.constant = values.front();
        }
        transforms.push_back(std::move(t));
        ++cont;
    }
    return transforms;
}

// Offsets of each column's segment inside an encoded row. Continuous parts
// come first in schema order (alpha then beta per column; constants occupy
// nothing), followed by one one-hot segment per discrete column.
class RowLayout {
public:
    struct Segment {
        std::size_t offset = 0;
        std::size_t width = 0;
    };

    RowLayout(const TableSchema& schema, const std::vector<ColumnTransform>& transforms) {
        if (transforms.size() != schema.n_continuous())
            throw LayoutMismatch("RowLayout: " + std::to_string(transforms.size()) +
                                 " transforms for " + std::to_string(schema.n_continuous()) +
                                 " continuous columns");
        std::size_t off = 0;
        std::size_t cont = 0;
        for (const Column& col : schema.columns()) {
            if (col.kind != ColumnKind::Continuous) continue;
            const std::size_t w = transforms[cont].encoded_width();
            continuous_.push_back({off, w});
            off += w;
            ++cont;
        }
        for (const Column& col : schema.columns()) {
            if (col.kind != ColumnKind::Discrete) continue;
            discrete_.push_back({off, col.categories.size()});
            off += col.categories.size();
        }
        total_ = off;
    }

    std::size_t total_width() const { return total_; }
    std::size_t n_continuous() const { return continuous_.size(); }
    std::size_t n_discrete() const { return discrete_.size(); }

    // Segment of continuous column c (counted among continuous columns):
    // [offset] is alpha, [offset+1, offset+width) is beta. Width 0 for
    // constant columns.
    const Segment& continuous_segment(std::size_t c) const { return continuous_.at(c); }
    const Segment& discrete_segment(std::size_t d) const { return discrete_.at(d); }

private:
    std::vector<Segment> continuous_;
    std::vector<Segment> discrete_;
    std::size_t total_ = 0;
};

// Mode-specific normalization of a whole row (the alpha/beta concatenation
// followed by the discrete one-hots).
inline std::vector<double> encode_row(const TableSchema& schema,
                                      const std::vector<ColumnTransform>& transforms,
                                      const Row& row, Rng& rng) {
    const RowLayout layout(schema, transforms);
    std::vector<double> out(layout.total_width(), 0.0);
    std::size_t cont = 0, disc = 0;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const Column& col = schema.column(j);
        if (col.kind == ColumnKind::Continuous) {
            const ColumnTransform& t = transforms[cont];
            if (!t.is_constant()) {
                const EncodedValue enc = encode_value(*t.model, row[j], rng);
                const auto& seg = layout.continuous_segment(cont);
                out[seg.offset] = enc.alpha;
                for (std::size_t b = 0; b < enc.beta.size(); ++b)
                    out[seg.offset + 1 + b] = enc.beta[b];
            }
            ++cont;
        } else {
            const auto& seg = layout.discrete_segment(disc);
            out[seg.offset + static_cast<std::size_t>(row[j])] = 1.0;
            ++disc;
        }
    }
    return out;
}

// Inverse of encode_row. Discrete cells come from the argmax of their
// segment, so relaxed generator outputs decode directly.
inline Row decode_row(const TableSchema& schema, const std::vector<ColumnTransform>& transforms,
                      std::span<const double> encoded) {
    const RowLayout layout(schema, transforms);
    if (encoded.size() != layout.total_width())
        throw LayoutMismatch("decode_row: encoded width " + std::to_string(encoded.size()) +
                             " vs layout width " + std::to_string(layout.total_width()));
    Row row(schema.size(), 0.0);
    std::size_t cont = 0, disc = 0;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const Column& col = schema.column(j);
        if (col.kind == ColumnKind::Continuous) {
            const ColumnTransform& t = transforms[cont];
            if (t.is_constant()) {
                row[j] = t.constant;
            } else {
                const auto& seg = layout.continuous_segment(cont);
                row[j] = decode_value(*t.model, encoded[seg.offset],
                                      encoded.subspan(seg.offset + 1, seg.width - 1));
            }
            ++cont;
        } else {
            const auto& seg = layout.discrete_segment(disc);
            std::size_t best = 0;
            for (std::size_t kk = 1; kk < seg.width; ++kk)
                if (encoded[seg.offset + kk] > encoded[seg.offset + best]) best = kk;
            row[j] = static_cast<double>(best);
            ++disc;
        }
    }
    return row;
}

}  // namespace tabsyn
