#include "winop/ocsvm.hpp"

#include "winop/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

namespace winop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTau = 1e-12;

// Kernel rows on demand: the whole Gram matrix for small problems, an LRU of
// rows otherwise. Row spans stay valid until two further distinct rows have
// been requested.
class KernelRows {
public:
    KernelRows(const FeatureMatrix& x, double gamma, const OcsvmParams& params)
        : x_(x), gamma_(gamma), n_(x.rows) {
        if (n_ <= params.full_gram_limit) {
            full_.resize(n_ * n_);
            for (std::size_t i = 0; i < n_; ++i) {
                full_[i * n_ + i] = 1.0;
                for (std::size_t j = i + 1; j < n_; ++j) {
                    const double k = rbf_kernel(x_.row(i), x_.row(j), gamma_);
                    full_[i * n_ + j] = k;
                    full_[j * n_ + i] = k;
                }
            }
        } else {
            capacity_ = std::max<std::size_t>(params.cache_rows, 2);
        }
    }

    std::span<const double> row(std::size_t i) {
        if (!full_.empty()) {
            return {full_.data() + i * n_, n_};
        }
        if (auto it = index_.find(i); it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second.first);
            return slots_[it->second.second];
        }
        std::size_t slot;
        if (slots_.size() < capacity_) {
            slot = slots_.size();
            slots_.emplace_back(n_);
        } else {
            const std::size_t victim = order_.back();
            order_.pop_back();
            slot = index_.at(victim).second;
            index_.erase(victim);
        }
        auto& buf = slots_[slot];
        for (std::size_t j = 0; j < n_; ++j) {
            buf[j] = rbf_kernel(x_.row(i), x_.row(j), gamma_);
        }
        order_.push_front(i);
        index_[i] = {order_.begin(), slot};
        return buf;
    }

private:
    const FeatureMatrix& x_;
    double gamma_;
    std::size_t n_;
    std::vector<double> full_;
    std::size_t capacity_ = 0;
    std::vector<std::vector<double>> slots_;
    std::list<std::size_t> order_;
    std::unordered_map<std::size_t, std::pair<std::list<std::size_t>::iterator, std::size_t>> index_;
};

}  // namespace

void OcsvmParams::validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw InvalidArgument("nu must lie in (0, 1], got " + std::to_string(nu));
    }
    if (gamma.mode == Gamma::Mode::fixed && !(gamma.value > 0.0)) {
        throw InvalidArgument("fixed gamma must be positive");
    }
    if (!(tolerance > 0.0)) {
        throw InvalidArgument("solver tolerance must be positive");
    }
    if (max_iter == 0) {
        throw InvalidArgument("max_iter must be positive");
    }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

double resolve_gamma(const FeatureMatrix& x, const Gamma& gamma) {
    if (gamma.mode == Gamma::Mode::fixed) {
        return gamma.value;
    }
    double var_sum = 0.0;
    std::vector<double> column(x.rows);
    for (std::size_t c = 0; c < x.cols; ++c) {
        for (std::size_t r = 0; r < x.rows; ++r) {
            column[r] = x.at(r, c);
        }
        const Moments m = moments(column);
        var_sum += m.stddev * m.stddev;
    }
    const double mean_var = var_sum / static_cast<double>(x.cols);
    if (!(mean_var > 0.0)) {
        throw DegenerateInput("gamma=scale undefined: feature columns have zero variance");
    }
    return 1.0 / (static_cast<double>(x.cols) * mean_var);
}

double OcsvmModel::decision(std::span<const double> x) const {
    if (x.size() != n_features) {
        throw InvalidArgument("feature count mismatch: model has " + std::to_string(n_features) +
                              ", input has " + std::to_string(x.size()));
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < coefficients.size(); ++s) {
        const std::span<const double> sv(support_vectors.data() + s * n_features, n_features);
        sum += coefficients[s] * rbf_kernel(sv, x, gamma);
    }
    return sum - rho;
}

std::vector<double> OcsvmModel::decision_function(const FeatureMatrix& x) const {
    if (x.cols != n_features || (!column_names.empty() && x.column_names != column_names)) {
        throw InvalidArgument("feature columns do not match the trained model");
    }
    std::vector<double> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        out[r] = decision(x.row(r));
    }
    return out;
}

OcsvmModel fit_ocsvm(const FeatureMatrix& x, const OcsvmParams& params) {
    params.validate();
    if (x.rows < 10) {
        throw InvalidArgument("one-class SVM needs at least 10 rows, got " +
                              std::to_string(x.rows));
    }
    if (x.cols == 0) {
        throw InvalidArgument("one-class SVM needs at least one feature column");
    }

    const std::size_t n = x.rows;
    const double gamma = resolve_gamma(x, params.gamma);
    KernelRows q(x, gamma, params);

    // Work in the unit-box scaling: 0 <= a_i <= 1, sum a_i = nu n. The
    // stored model divides by nu n.
    const double total = params.nu * static_cast<double>(n);
    std::vector<double> alpha(n, 0.0);
    const auto full = static_cast<std::size_t>(total);
    for (std::size_t i = 0; i < full && i < n; ++i) {
        alpha[i] = 1.0;
    }
    if (full < n) {
        alpha[full] = total - static_cast<double>(full);
    }

    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            const auto qi = q.row(i);
            for (std::size_t k = 0; k < n; ++k) {
                grad[k] += alpha[i] * qi[k];
            }
        }
    }

    auto at_upper = [&](std::size_t t) { return alpha[t] >= 1.0; };
    auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    std::size_t iter = 0;
    double violation = 0.0;
    for (;;) {
        // i: steepest feasible ascent; j: largest second-order objective decrease.
        double gmax = -kInf;
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!at_upper(t) && -grad[t] >= gmax) {
                gmax = -grad[t];
                i = t;
            }
        }
        double gmax2 = -kInf;
        std::size_t j = n;
        double best = kInf;
        std::span<const double> qi;
        if (i < n) {
            qi = q.row(i);
        }
        for (std::size_t t = 0; t < n; ++t) {
            if (at_lower(t)) {
                continue;
            }
            gmax2 = std::max(gmax2, grad[t]);
            const double diff = gmax + grad[t];
            if (i < n && diff > 0.0) {
                double quad = 2.0 - 2.0 * qi[t];
                if (quad <= 0.0) {
                    quad = kTau;
                }
                const double obj = -(diff * diff) / quad;
                if (obj <= best) {
                    best = obj;
                    j = t;
                }
            }
        }
        violation = gmax + gmax2;
        if (violation < params.tolerance || i == n || j == n) {
            break;
        }
        if (iter >= params.max_iter) {
            throw ConvergenceError("one-class SVM did not converge within " +
                                       std::to_string(params.max_iter) + " pair updates",
                                   violation);
        }
        ++iter;

        qi = q.row(i);
        const auto qj = q.row(j);
        double quad = 2.0 - 2.0 * qi[j];
        if (quad <= 0.0) {
            quad = kTau;
        }
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = old_i + old_j;
        double ai = old_i - delta;
        double aj = old_j + delta;
        if (sum > 1.0) {
            if (ai > 1.0) {
                ai = 1.0;
                aj = sum - 1.0;
            }
        } else if (aj < 0.0) {
            aj = 0.0;
            ai = sum;
        }
        if (sum > 1.0) {
            if (aj > 1.0) {
                aj = 1.0;
                ai = sum - 1.0;
            }
        } else if (ai < 0.0) {
            ai = 0.0;
            aj = sum;
        }
        alpha[i] = ai;
        alpha[j] = aj;
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t k = 0; k < n; ++k) {
            grad[k] += qi[k] * di + qj[k] * dj;
        }
    }

    // Offset: mean gradient over free variables, else midpoint of the bounds.
    double ub = kInf;
    double lb = -kInf;
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (at_upper(t)) {
            lb = std::max(lb, grad[t]);
        } else if (at_lower(t)) {
            ub = std::min(ub, grad[t]);
        } else {
            free_sum += grad[t];
            ++free_count;
        }
    }
    double r;
    if (free_count > 0) {
        r = free_sum / static_cast<double>(free_count);
    } else if (std::isinf(ub)) {
        r = lb;
    } else if (std::isinf(lb)) {
        r = ub;
    } else {
        r = 0.5 * (ub + lb);
    }

    OcsvmModel model;
    model.nu = params.nu;
    model.gamma = gamma;
    model.n_features = x.cols;
    model.column_names = x.column_names;
    model.rho = r / total;
    model.iterations = iter;
    model.kkt_violation = violation;
    model.training_decisions.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        model.training_decisions[t] = (grad[t] - r) / total;
        if (alpha[t] > 0.0) {
            model.coefficients.push_back(alpha[t] / total);
            const auto row = x.row(t);
            model.support_vectors.insert(model.support_vectors.end(), row.begin(), row.end());
        }
    }
    return model;
}

StatePrediction predict_state(const OcsvmModel& model, const FeatureMatrix& x,
                              OutlierMapping mapping) {
    std::vector<double> decisions = model.decision_function(x);
    std::vector<std::uint8_t> outlier(decisions.size());
    std::size_t outliers = 0;
    for (std::size_t r = 0; r < decisions.size(); ++r) {
        outlier[r] = decisions[r] < 0.0 ? 1 : 0;
        outliers += outlier[r];
    }
    const double fraction = static_cast<double>(outliers) / static_cast<double>(decisions.size());
    OutlierMapping resolved = mapping;
    if (mapping == OutlierMapping::automatic) {
        resolved = fraction <= 0.5 ? OutlierMapping::outlier_is_open
                                   : OutlierMapping::outlier_is_closed;
    }
    if (resolved == OutlierMapping::outlier_is_closed) {
        for (auto& s : outlier) {
            s = static_cast<std::uint8_t>(1 - s);
        }
    }
    return StatePrediction{BinarySeries(x.grid, std::move(outlier)), resolved, fraction,
                           std::move(decisions)};
}

std::string to_string(OutlierMapping mapping) {
    switch (mapping) {
        case OutlierMapping::outlier_is_open: return "outlier_is_open";
        case OutlierMapping::outlier_is_closed: return "outlier_is_closed";
        case OutlierMapping::automatic: return "auto";
    }
    return "auto";
}

OutlierMapping parse_outlier_mapping(const std::string& text) {
    if (text == "outlier_is_open") return OutlierMapping::outlier_is_open;
    if (text == "outlier_is_closed") return OutlierMapping::outlier_is_closed;
    if (text == "auto") return OutlierMapping::automatic;
    throw InvalidArgument("unknown outlier mapping '" + text +
                          "' (expected auto, outlier_is_open or outlier_is_closed)");
}

}  // namespace winop
