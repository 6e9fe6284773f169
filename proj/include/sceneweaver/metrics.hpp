#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sceneweaver/geometry.hpp"
#include "sceneweaver/scene.hpp"

namespace sceneweaver {

struct PhysicalMetrics {
    int obj_count = 0;        // #Obj
    int out_of_boundary = 0;  // #OB
    int collision_pairs = 0;  // #CN

    bool clean() const { return out_of_boundary == 0 && collision_pairs == 0; }

    friend bool operator==(const PhysicalMetrics&, const PhysicalMetrics&) = default;
};

struct PerceptualScores {
    int realism = 0;
    int functionality = 0;
    int layout = 0;
    int completion = 0;
    std::string realism_comment;
    std::string functionality_comment;
    std::string layout_comment;
    std::string completion_comment;

    int min_score() const;
    int sum() const { return realism + functionality + layout + completion; }

    friend bool operator==(const PerceptualScores&, const PerceptualScores&) = default;
};

struct Reflection {
    PhysicalMetrics physical;
    PerceptualScores perceptual;
    std::vector<std::string> suggestions;
    int step = 0;

    friend bool operator==(const Reflection&, const Reflection&) = default;
};

/// #Obj / #OB / #CN at oriented-box level. Pairs whose declared on_top or
/// inside relation currently holds are exempt from #CN: contact with a
/// support surface is not a collision.
PhysicalMetrics physical_metrics(const Scene& s, const Tolerances& tol = {});

/// Deterministic rubric standing in for the MLLM verifier; see the module
/// tests for the monotonicity laws it maintains.
PerceptualScores heuristic_score(const Scene& s);

class Scorer {
  public:
    virtual ~Scorer() = default;
    /// view_png may be empty when the scorer does not need pixels.
    virtual PerceptualScores score(const Scene& s, const std::string& view_png,
                                   const std::string& query) = 0;
    virtual bool needs_pixels() const { return false; }
};

class HeuristicScorer final : public Scorer {
  public:
    PerceptualScores score(const Scene& s, const std::string&, const std::string&) override {
        return heuristic_score(s);
    }
};

/// Clamps every score into [0,10]; out-of-range values are recorded through
/// warn (if set) and clamped rather than rejected.
PerceptualScores perceptual_scores(const Scene& s, const std::string& view_png,
                                   const std::string& query, Scorer& scorer,
                                   const std::function<void(const std::string&)>& warn = {});

/// Category classification heuristics shared by the scorer and tools.
bool is_supporter_category(const std::string& category);
bool is_container_category(const std::string& category);

/// Metrics report JSON (field names fixed: obj/ob/cn/realism/...).
std::string metrics_report(const PhysicalMetrics& phys, const PerceptualScores* perc);

}  // namespace sceneweaver
