#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ledit/image.hpp"
#include "ledit/lexicon.hpp"
#include "ledit/rng.hpp"
#include "ledit/tensor.hpp"

namespace ledit {

enum class Shape { Circle, Square, Triangle, Star };
inline constexpr int kNumShapes = 4;
inline constexpr int kNumColors = 8;

struct NamedColor {
    const char* name;
    float r, g, b;
};

const std::array<NamedColor, kNumColors>& named_colors();
const std::array<const char*, kNumShapes>& shape_names();
int color_index(const std::string& name); // -1 when not a canonical color

// A scene is fully determined by its fields; the caption encodes the
// categorical ones (shape, shape_color, background_color).
struct SceneSpec {
    Shape shape = Shape::Circle;
    int shape_color = 0;      // index into named_colors()
    int background_color = 1; // != shape_color
    float center_row = 0.5f;  // fraction of image height in [0.2, 0.8]
    float center_col = 0.5f;
    float radius = 0.2f;      // fraction in [0.1, 0.3]

    std::string caption() const;
    bool same_categoricals(const SceneSpec& o) const {
        return shape == o.shape && shape_color == o.shape_color &&
               background_color == o.background_color;
    }
};

struct ImageCaptionRecord {
    Tensor image;  // {H,W,3} in [0,1]
    std::string caption;
    Tensor gt_mask; // {H,W} 0/1; empty for external records without masks
    std::optional<SceneSpec> scene;
};

// Deterministic, uniform over the legal SceneSpec space.
SceneSpec generate_scene(uint64_t rng_seed);

// Rasterizes a scene. Pixels whose center lies inside the shape carry the
// exact shape color; pixels crossing the boundary from outside are blended
// by supersampled coverage. gt_mask marks the center-inside pixels.
ImageCaptionRecord render(const SceneSpec& scene, int size);

// Parses a caption produced by SceneSpec::caption(); geometry fields are
// canonical defaults. Throws DataError when the caption does not match.
SceneSpec parse_caption(const std::string& caption);

// Line-delimited JSON manifest: {"image_path":..., "caption":..., "mask_path':...?}
std::vector<ImageCaptionRecord> load_manifest(const std::string& path);

// Caption refiner adapter; pluggable stand-in for an external captioner.
class CaptionRefiner {
public:
    virtual ~CaptionRefiner() = default;
    virtual std::string refine(const ImageCaptionRecord& record) const = 0;
};

// Default refiner: identity for synthetic records (scene present),
// whitespace/punctuation cleanup template for external ones.
const CaptionRefiner& default_refiner();

// Applies a refiner and validates its output. Adapter failures and empty
// outputs surface as AdapterError.
std::string refine_caption(const ImageCaptionRecord& record, const CaptionRefiner& refiner);

// Generates `count` records from a master seed (record i uses sub-seed i).
std::vector<ImageCaptionRecord> generate_corpus(uint64_t master_seed, int count, int size);

// Writes images/masks as PNGs plus manifest.jsonl under out_dir; returns the
// manifest path.
std::string write_corpus(const std::vector<ImageCaptionRecord>& corpus, const std::string& out_dir);

} // namespace ledit
