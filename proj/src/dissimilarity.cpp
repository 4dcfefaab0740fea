#include "classpulse/dissimilarity.hpp"

#include "classpulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace classpulse {

DissimilarityMatrix::DissimilarityMatrix(std::vector<std::string> labels, std::vector<double> values,
                                         std::vector<double> feature_ranges)
    : labels_(std::move(labels)), values_(std::move(values)), feature_ranges_(std::move(feature_ranges)) {
    const std::size_t n = labels_.size();
    if (values_.size() != n * n) throw StructuralError("dissimilarity matrix is not n x n");
    for (std::size_t i = 0; i < n; ++i) {
        if ((*this)(i, i) != 0.0) throw StructuralError("dissimilarity diagonal must be zero");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (*this)(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                throw StructuralError("dissimilarities must be finite and non-negative");
            }
            if (v != (*this)(j, i)) throw StructuralError("dissimilarity matrix is not symmetric");
        }
    }
}

DissimilarityMatrix DissimilarityMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw StructuralError("dissimilarity matrix is not n x n");
        labels.push_back(std::to_string(i));
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return DissimilarityMatrix(std::move(labels), std::move(values));
}

DissimilarityMatrix gower_dissimilarity(const FeatureMatrix& fm) {
    const std::size_t n = fm.rows();
    const std::size_t p = fm.cols();
    if (n == 0) throw StructuralError("gower dissimilarity needs at least one observation");
    if (fm.values.size() != n * p) throw StructuralError("feature matrix shape mismatch");
    for (double v : fm.values) {
        if (!std::isfinite(v)) throw StructuralError("feature values must be finite");
    }

    std::vector<double> ranges(p, 0.0);
    std::vector<std::size_t> usable;
    for (std::size_t k = 0; k < p; ++k) {
        if (fm.feature_kinds[k] == FeatureKind::Categorical) {
            std::set<double> levels;
            for (std::size_t i = 0; i < n; ++i) levels.insert(fm.at(i, k));
            ranges[k] = levels.size() > 1 ? 1.0 : 0.0;
        } else {
            double lo = fm.at(0, k);
            double hi = lo;
            for (std::size_t i = 1; i < n; ++i) {
                lo = std::min(lo, fm.at(i, k));
                hi = std::max(hi, fm.at(i, k));
            }
            ranges[k] = hi - lo;
        }
        if (ranges[k] > 0.0) usable.push_back(k);
    }
    if (n >= 2 && usable.empty()) {
        throw DegenerateFeaturesError("no feature column varies across observations");
    }

    std::vector<double> d(n * n, 0.0);
    const double count = static_cast<double>(usable.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sum = 0.0;
            for (auto k : usable) {
                if (fm.feature_kinds[k] == FeatureKind::Categorical) {
                    sum += fm.at(i, k) == fm.at(j, k) ? 0.0 : 1.0;
                } else {
                    sum += std::abs(fm.at(i, k) - fm.at(j, k)) / ranges[k];
                }
            }
            d[i * n + j] = d[j * n + i] = sum / count;
        }
    }
    return DissimilarityMatrix(fm.students, std::move(d), std::move(ranges));
}

}  // namespace classpulse
