#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzyseg/core.hpp"

namespace fuzzyseg {

struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<bool> bits;  // true = object

    BinaryMask() = default;
    BinaryMask(std::size_t w, std::size_t h, std::vector<bool> b);

    std::size_t pixel_count() const { return width * height; }
    std::size_t object_count() const;
};

/// Dice (2|A∩B| / (|A|+|B|)) is the conventional similarity index for
/// segmentation overlap and the default; Jaccard is offered so alternatives
/// can be probed.
enum class SimilarityIndex { Dice, Jaccard };

struct EvalReport {
    double similarity = 0.0;            // percent
    double false_positive_ratio = 0.0;  // percent of ground-truth object size
    double false_negative_ratio = 0.0;  // percent of ground-truth object size
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline constexpr std::string_view kEvalCsvHeader =
    "algo,similarity,fpr,fnr,tp,fp,fn,tn";

/// Hard labels by per-column argmax, ties to the lowest cluster index.
std::vector<std::size_t> defuzzify(const MembershipMatrix& u);

/// Assigns each cluster to object or background by whichever choice maximizes
/// pixel agreement with the reference; returns the object clusters sorted
/// ascending. Ties (equal agreement either way) go to background. Because
/// clusters partition the pixels, this per-cluster greedy choice equals the
/// exhaustive optimum over all 2^c assignments.
std::vector<std::size_t> match_clusters(const std::vector<std::size_t>& labels,
                                        const BinaryMask& gt, std::size_t c);

/// Binary mask from hard labels and a set of object clusters.
BinaryMask labels_to_mask(const std::vector<std::size_t>& labels, std::size_t width,
                          std::size_t height,
                          const std::vector<std::size_t>& object_clusters);

/// similarity = 100 * 2tp / (2tp + fp + fn) (Dice) or 100 * tp / (tp + fp + fn)
/// (Jaccard); FPR = 100 * fp / |gt object|; FNR = 100 * fn / |gt object|.
/// Throws InvalidReference when gt has no object pixel.
EvalReport evaluate(const BinaryMask& seg, const BinaryMask& gt,
                    SimilarityIndex index = SimilarityIndex::Dice);

/// Flat key=value block, one key per line.
std::string to_key_value(const EvalReport& report);

/// One CSV row matching kEvalCsvHeader.
std::string to_csv_row(const EvalReport& report, std::string_view algo);

}  // namespace fuzzyseg
