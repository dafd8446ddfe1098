#pragma once

#include "winop/features.hpp"
#include "winop/timeseries.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace winop {

/// RBF width. `scale` resolves to 1 / (n_features * mean column variance).
struct Gamma {
    enum class Mode { scale, fixed };
    Mode mode = Mode::scale;
    double value = 0.0;

    static Gamma scale() { return {}; }
    static Gamma fixed(double g) { return {Mode::fixed, g}; }
};

struct OcsvmParams {
    double nu = 0.5;
    Gamma gamma;
    double tolerance = 1e-3;        // maximal KKT violation at convergence
    std::size_t max_iter = 100000;  // pair updates
    // Above this many rows kernel rows are recomputed through a bounded LRU
    // cache instead of holding the full Gram matrix.
    std::size_t full_gram_limit = 8000;
    std::size_t cache_rows = 512;

    void validate() const;
};

/// nu-one-class SVM with an RBF kernel:
///   f(x) = sum_i alpha_i K(x_i, x) - rho,  0 <= alpha_i <= 1/(nu n),  sum alpha_i = 1.
struct OcsvmModel {
    double nu = 0.0;
    double gamma = 0.0;
    std::size_t n_features = 0;
    std::vector<std::string> column_names;
    std::vector<double> support_vectors;  // row-major, n_support x n_features
    std::vector<double> coefficients;     // alpha_i > 0 for each support vector
    double rho = 0.0;
    std::vector<double> training_decisions;  // from the solver gradient
    std::size_t iterations = 0;
    double kkt_violation = 0.0;

    [[nodiscard]] std::size_t support_count() const { return coefficients.size(); }
    [[nodiscard]] double decision(std::span<const double> x) const;
    [[nodiscard]] std::vector<double> decision_function(const FeatureMatrix& x) const;
};

[[nodiscard]] double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Resolves Gamma::scale against the data.
[[nodiscard]] double resolve_gamma(const FeatureMatrix& x, const Gamma& gamma);

/// SMO with second-order working-set selection. Throws ConvergenceError
/// when max_iter pair updates do not reach the KKT tolerance.
[[nodiscard]] OcsvmModel fit_ocsvm(const FeatureMatrix& x, const OcsvmParams& params);

enum class OutlierMapping { outlier_is_open, outlier_is_closed, automatic };

struct StatePrediction {
    BinarySeries state;
    OutlierMapping resolved = OutlierMapping::outlier_is_open;
    double outlier_fraction = 0.0;
    std::vector<double> decisions;
};

/// Rows with f(x) < 0 are outliers. `automatic` labels the minority class
/// (normally the outliers) as open.
[[nodiscard]] StatePrediction predict_state(const OcsvmModel& model, const FeatureMatrix& x,
                                            OutlierMapping mapping);

[[nodiscard]] std::string to_string(OutlierMapping mapping);
[[nodiscard]] OutlierMapping parse_outlier_mapping(const std::string& text);

}  // namespace winop
