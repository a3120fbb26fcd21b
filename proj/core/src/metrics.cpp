#include "fuzzyseg/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace fuzzyseg {

BinaryMask::BinaryMask(std::size_t w, std::size_t h, std::vector<bool> b)
    : width(w), height(h), bits(std::move(b)) {
    if (width < 1 || height < 1) {
        throw InvalidParameters("mask dimensions must be at least 1x1");
    }
    if (bits.size() != width * height) {
        throw InvalidParameters("mask bit count does not match width*height");
    }
}

std::size_t BinaryMask::object_count() const {
    return std::size_t(std::count(bits.begin(), bits.end(), true));
}

std::vector<std::size_t> defuzzify(const MembershipMatrix& u) {
    return argmax_labels(u.values);
}

std::vector<std::size_t> match_clusters(const std::vector<std::size_t>& labels,
                                        const BinaryMask& gt, std::size_t c) {
    if (labels.size() != gt.pixel_count()) {
        throw InvalidParameters("label count does not match mask size");
    }
    std::vector<std::size_t> object_hits(c, 0);
    std::vector<std::size_t> background_hits(c, 0);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const std::size_t cluster = labels[k];
        if (cluster >= c) throw InvalidParameters("label exceeds cluster count");
        if (gt.bits[k]) {
            ++object_hits[cluster];
        } else {
            ++background_hits[cluster];
        }
    }
    std::vector<std::size_t> object_clusters;
    for (std::size_t i = 0; i < c; ++i) {
        if (object_hits[i] > background_hits[i]) object_clusters.push_back(i);
    }
    return object_clusters;
}

BinaryMask labels_to_mask(const std::vector<std::size_t>& labels, std::size_t width,
                          std::size_t height,
                          const std::vector<std::size_t>& object_clusters) {
    if (labels.size() != width * height) {
        throw InvalidParameters("label count does not match dimensions");
    }
    std::vector<bool> bits(labels.size(), false);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        bits[k] = std::find(object_clusters.begin(), object_clusters.end(),
                            labels[k]) != object_clusters.end();
    }
    return BinaryMask(width, height, std::move(bits));
}

EvalReport evaluate(const BinaryMask& seg, const BinaryMask& gt,
                    SimilarityIndex index) {
    if (seg.width != gt.width || seg.height != gt.height) {
        throw InvalidParameters("mask dimensions differ");
    }
    const std::size_t object = gt.object_count();
    if (object == 0) {
        throw InvalidReference("ground truth has no object pixels");
    }

    EvalReport report;
    for (std::size_t k = 0; k < seg.bits.size(); ++k) {
        const bool s = seg.bits[k];
        const bool g = gt.bits[k];
        if (s && g) {
            ++report.tp;
        } else if (s && !g) {
            ++report.fp;
        } else if (!s && g) {
            ++report.fn;
        } else {
            ++report.tn;
        }
    }

    const double tp = double(report.tp);
    const double fp = double(report.fp);
    const double fn = double(report.fn);
    if (index == SimilarityIndex::Dice) {
        const double denom = 2.0 * tp + fp + fn;
        report.similarity = denom > 0.0 ? 100.0 * 2.0 * tp / denom : 100.0;
    } else {
        const double denom = tp + fp + fn;
        report.similarity = denom > 0.0 ? 100.0 * tp / denom : 100.0;
    }
    report.false_positive_ratio = 100.0 * fp / double(object);
    report.false_negative_ratio = 100.0 * fn / double(object);
    return report;
}

namespace {

std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.9g", v);
    return buffer;
}

}  // namespace

std::string to_key_value(const EvalReport& r) {
    std::string out;
    out += "similarity=" + format_value(r.similarity) + "\n";
    out += "false_positive_ratio=" + format_value(r.false_positive_ratio) + "\n";
    out += "false_negative_ratio=" + format_value(r.false_negative_ratio) + "\n";
    out += "tp=" + std::to_string(r.tp) + "\n";
    out += "fp=" + std::to_string(r.fp) + "\n";
    out += "fn=" + std::to_string(r.fn) + "\n";
    out += "tn=" + std::to_string(r.tn) + "\n";
    return out;
}

std::string to_csv_row(const EvalReport& r, std::string_view algo) {
    std::string out(algo);
    out += "," + format_value(r.similarity);
    out += "," + format_value(r.false_positive_ratio);
    out += "," + format_value(r.false_negative_ratio);
    out += "," + std::to_string(r.tp);
    out += "," + std::to_string(r.fp);
    out += "," + std::to_string(r.fn);
    out += "," + std::to_string(r.tn);
    return out;
}

}  // namespace fuzzyseg
