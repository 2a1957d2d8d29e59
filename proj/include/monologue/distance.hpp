#pragma once

#include "monologue/gateway.hpp"
#include "monologue/types.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace monologue {

inline constexpr double kUnitNormTolerance = 1e-6;

// 1 - cos(u, v) for unit vectors, clamped to [0, 2]. Symmetric bit-for-bit.
// Throws DimensionMismatch, or NotNormalized when a norm is off by more than 1e-6.
double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v);

// Pairwise scorer over embeddings. Cosine is the default.
class DistanceScorer {
public:
    virtual ~DistanceScorer() = default;
    virtual double distance(const EmbeddingVector& u, const EmbeddingVector& v) const = 0;
};

class CosineScorer final : public DistanceScorer {
public:
    double distance(const EmbeddingVector& u, const EmbeddingVector& v) const override {
        return cosine_distance(u, v);
    }
};

// How the pairwise distances of a 3-handle combination fold into one score.
enum class Aggregate { Mean, Min, Max };

class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::vector<std::string> texts, std::vector<double> upper_and_lower);

    [[nodiscard]] const std::vector<std::string>& texts() const { return texts_; }
    [[nodiscard]] std::size_t size() const { return texts_.size(); }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * texts_.size() + j]; }
    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& text) const;

    // Header row and column hold the association strings.
    [[nodiscard]] std::string to_csv() const;

private:
    std::vector<std::string> texts_;
    std::vector<double> values_; // row-major n x n, mirrored
    std::map<std::string, std::size_t> index_;
};

/// Embeds every distinct association string once (first-appearance order)
/// and fills the symmetric matrix; the diagonal is exactly 0.
DistanceMatrix build_matrix(const AssociationCatalog& catalog, Embedder& embedder,
                            const DistanceScorer& scorer = CosineScorer{});

// Score of one pick per handle: the pair distance for two handles, the
// aggregate of the three pairwise distances for three.
double combination_score(const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                         const std::vector<Pick>& picks, Aggregate aggregate = Aggregate::Mean);

/// Every cross-handle combination, best first: descending score for
/// MaxDistance, ascending for MinDistance. Equal scores keep the
/// lexicographic order of their picks. Throws MatrixCatalogMismatch when an
/// association is missing from the matrix.
std::vector<ScoredCombination> rank_combinations(const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                                                 CombinationPolicy policy, Aggregate aggregate = Aggregate::Mean);

// Head of the ranking for Max/MinDistance. Manual validates the picks
// against the catalog and rescores them from the matrix.
ScoredCombination select_combination(const std::vector<ScoredCombination>& ranked, CombinationPolicy policy,
                                     const std::optional<std::vector<Pick>>& manual_picks,
                                     const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                                     Aggregate aggregate = Aggregate::Mean);

} // namespace monologue
