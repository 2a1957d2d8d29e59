#include "monologue/distance.hpp"

#include "monologue/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace monologue {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::size_t matrix_index(const DistanceMatrix& m, const AssociationCatalog& c, const Pick& p) {
    auto idx = m.index_of(c.associations[p.handle_ordinal][p.association_index]);
    if (!idx) {
        throw Error(ErrorCode::MatrixCatalogMismatch,
                    "association \"" + c.associations[p.handle_ordinal][p.association_index] + "\" is not in the matrix");
    }
    return *idx;
}

} // namespace

double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.values.size() != v.values.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vector dimensions differ: " + std::to_string(u.values.size()) +
                                                      " vs " + std::to_string(v.values.size()));
    }
    const double nu = u.norm();
    const double nv = v.norm();
    if (std::abs(nu - 1.0) > kUnitNormTolerance || std::abs(nv - 1.0) > kUnitNormTolerance)
        throw Error(ErrorCode::NotNormalized, "cosine distance needs unit vectors");
    double dot = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) dot += u.values[i] * v.values[i];
    // Dividing by the norms keeps d(u, u) at 0 for vectors within tolerance of unit length.
    const double d = 1.0 - dot / (nu * nv);
    return std::clamp(d, 0.0, 2.0);
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> texts, std::vector<double> values)
    : texts_(std::move(texts)), values_(std::move(values)) {
    for (std::size_t i = 0; i < texts_.size(); ++i) index_.emplace(texts_[i], i);
}

std::optional<std::size_t> DistanceMatrix::index_of(const std::string& text) const {
    auto it = index_.find(text);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string DistanceMatrix::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    for (const auto& t : texts_) out << ',' << csv_field(t);
    out << '\n';
    for (std::size_t i = 0; i < texts_.size(); ++i) {
        out << csv_field(texts_[i]);
        for (std::size_t j = 0; j < texts_.size(); ++j) out << ',' << at(i, j);
        out << '\n';
    }
    return out.str();
}

DistanceMatrix build_matrix(const AssociationCatalog& catalog, Embedder& embedder, const DistanceScorer& scorer) {
    std::vector<std::string> texts;
    std::map<std::string, std::size_t> seen;
    for (const auto& list : catalog.associations) {
        for (const auto& a : list) {
            if (seen.emplace(a, texts.size()).second) texts.push_back(a);
        }
    }
    if (texts.empty()) throw Error(ErrorCode::InvariantViolation, "catalog has no associations");

    auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size())
        throw Error(ErrorCode::ProviderRejected, "embedder returned " + std::to_string(vectors.size()) + " vectors for " +
                                                     std::to_string(texts.size()) + " texts");

    const std::size_t n = texts.size();
    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = scorer.distance(vectors[i], vectors[j]);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    return DistanceMatrix(std::move(texts), std::move(values));
}

double combination_score(const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                         const std::vector<Pick>& picks, Aggregate aggregate) {
    std::vector<std::size_t> idx;
    idx.reserve(picks.size());
    for (const auto& p : picks) idx.push_back(matrix_index(matrix, catalog, p));

    double sum = 0.0;
    double lo = 2.0;
    double hi = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double d = matrix.at(idx[a], idx[b]);
            sum += d;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            ++pairs;
        }
    }
    if (pairs == 0) return 0.0;
    switch (aggregate) {
    case Aggregate::Min: return lo;
    case Aggregate::Max: return hi;
    case Aggregate::Mean: break;
    }
    return sum / static_cast<double>(pairs);
}

std::vector<ScoredCombination> rank_combinations(const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                                                 CombinationPolicy policy, Aggregate aggregate) {
    if (policy == CombinationPolicy::Manual)
        throw Error(ErrorCode::InvariantViolation, "ranking needs the maxDistance or minDistance policy");
    for (const auto& list : catalog.associations) {
        for (const auto& a : list) {
            if (!matrix.index_of(a))
                throw Error(ErrorCode::MatrixCatalogMismatch, "association \"" + a + "\" is not in the matrix");
        }
    }

    const std::size_t n = catalog.handles.size();
    std::vector<ScoredCombination> out;
    if (n == 0) return out;
    for (const auto& list : catalog.associations) {
        if (list.empty()) return out;
    }

    // odometer over one index per handle; emits picks in lexicographic order
    std::vector<std::size_t> cursor(n, 0);
    while (true) {
        ScoredCombination combo;
        combo.policy = policy;
        for (std::size_t h = 0; h < n; ++h) combo.picks.push_back(Pick{h, cursor[h]});
        combo.distance = combination_score(catalog, matrix, combo.picks, aggregate);
        out.push_back(std::move(combo));

        std::size_t h = n;
        while (h > 0) {
            --h;
            if (++cursor[h] < catalog.associations[h].size()) break;
            cursor[h] = 0;
            if (h == 0) {
                h = n; // wrapped around
                break;
            }
        }
        if (h == n) break;
    }

    const bool descending = policy == CombinationPolicy::MaxDistance;
    std::stable_sort(out.begin(), out.end(), [descending](const ScoredCombination& a, const ScoredCombination& b) {
        return descending ? a.distance > b.distance : a.distance < b.distance;
    });
    return out;
}

ScoredCombination select_combination(const std::vector<ScoredCombination>& ranked, CombinationPolicy policy,
                                     const std::optional<std::vector<Pick>>& manual_picks,
                                     const AssociationCatalog& catalog, const DistanceMatrix& matrix,
                                     Aggregate aggregate) {
    if (policy != CombinationPolicy::Manual) {
        if (ranked.empty()) throw Error(ErrorCode::EmptyRanking, "no combinations to choose from");
        auto head = ranked.front();
        head.policy = policy;
        return head;
    }
    if (!manual_picks) throw Error(ErrorCode::InvalidManualPick, "manual policy needs explicit picks");
    const auto& picks = *manual_picks;
    if (picks.size() != catalog.handles.size())
        throw Error(ErrorCode::InvalidManualPick, "need exactly one pick per handle (" +
                                                      std::to_string(catalog.handles.size()) + ")");
    for (std::size_t i = 0; i < picks.size(); ++i) {
        if (picks[i].handle_ordinal != i)
            throw Error(ErrorCode::InvalidManualPick, "picks must list handles in order 0.." +
                                                          std::to_string(catalog.handles.size() - 1));
        if (picks[i].association_index >= catalog.associations[i].size())
            throw Error(ErrorCode::InvalidManualPick, "association index " + std::to_string(picks[i].association_index) +
                                                          " is out of range for handle " + std::to_string(i));
    }
    ScoredCombination combo;
    combo.picks = picks;
    combo.policy = CombinationPolicy::Manual;
    combo.distance = combination_score(catalog, matrix, picks, aggregate);
    return combo;
}

} // namespace monologue
