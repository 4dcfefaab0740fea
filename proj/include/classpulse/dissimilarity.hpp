#pragma once

#include "classpulse/domain.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace classpulse {

/// Symmetric n x n dissimilarities with a zero diagonal, stored densely.
class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;

    /// `values` is row-major n x n. Throws StructuralError unless the matrix is
    /// square, symmetric, finite, non-negative and zero on the diagonal.
    DissimilarityMatrix(std::vector<std::string> labels, std::vector<double> values,
                        std::vector<double> feature_ranges = {});

    static DissimilarityMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return labels_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Normalising range per feature column (Gower only). Categorical columns
    /// report 1 when usable and 0 when single-valued.
    const std::vector<double>& feature_ranges() const noexcept { return feature_ranges_; }

    friend bool operator==(const DissimilarityMatrix&, const DissimilarityMatrix&) = default;

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
    std::vector<double> feature_ranges_;
};

/// Gower dissimilarity: mean over usable columns of |x_ik - x_jk| / R_k for
/// numeric columns and a 0/1 mismatch for categorical ones. Zero-range numeric
/// columns and single-valued categorical columns are left out of both the sum
/// and the count.
///
/// Throws StructuralError for n = 0 or non-finite values, and
/// DegenerateFeaturesError when n >= 2 and no column is usable.
DissimilarityMatrix gower_dissimilarity(const FeatureMatrix& fm);

}  // namespace classpulse
