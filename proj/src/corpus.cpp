#include "ledit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ledit/common.hpp"

namespace fs = std::filesystem;

namespace ledit {

const std::array<NamedColor, kNumColors>& named_colors() {
    static const std::array<NamedColor, kNumColors> colors = {{
        {"red", 1.0f, 0.0f, 0.0f},
        {"green", 0.0f, 0.8f, 0.0f},
        {"blue", 0.0f, 0.0f, 1.0f},
        {"yellow", 1.0f, 0.9f, 0.0f},
        {"orange", 1.0f, 0.5f, 0.0f},
        {"purple", 0.6f, 0.0f, 0.8f},
        {"black", 0.0f, 0.0f, 0.0f},
        {"white", 1.0f, 1.0f, 1.0f},
    }};
    return colors;
}

const std::array<const char*, kNumShapes>& shape_names() {
    static const std::array<const char*, kNumShapes> names = {"circle", "square", "triangle", "star"};
    return names;
}

int color_index(const std::string& name) {
    const auto& colors = named_colors();
    for (int i = 0; i < kNumColors; ++i)
        if (name == colors[i].name) return i;
    return -1;
}

std::string SceneSpec::caption() const {
    std::string s = "a ";
    s += named_colors()[shape_color].name;
    s += ' ';
    s += shape_names()[static_cast<int>(shape)];
    s += " on a ";
    s += named_colors()[background_color].name;
    s += " background";
    return s;
}

namespace {

// Legal radius leaves a 0.02 margin to every canvas edge.
bool scene_fits(float row, float col, float radius) {
    float room = std::min(std::min(row, 1.0f - row), std::min(col, 1.0f - col));
    return radius <= room - 0.02f;
}

// Point-in-shape test in unit-canvas coordinates.
bool inside_shape(const SceneSpec& s, float y, float x) {
    float dy = y - s.center_row;
    float dx = x - s.center_col;
    switch (s.shape) {
        case Shape::Circle:
            return dy * dy + dx * dx <= s.radius * s.radius;
        case Shape::Square: {
            float half = s.radius * 0.70710678f; // inscribed in the radius circle
            return std::fabs(dy) <= half && std::fabs(dx) <= half;
        }
        case Shape::Triangle: {
            // Equilateral triangle inscribed in the radius circle, apex up.
            float r = s.radius;
            float ax = 0.0f, ay = -r;
            float bx = 0.8660254f * r, by = 0.5f * r;
            float cx = -0.8660254f * r, cy = 0.5f * r;
            auto side = [&](float x0, float y0, float x1, float y1) {
                return (x1 - x0) * (dy - y0) - (y1 - y0) * (dx - x0);
            };
            float s1 = side(ax, ay, bx, by);
            float s2 = side(bx, by, cx, cy);
            float s3 = side(cx, cy, ax, ay);
            return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
        }
        case Shape::Star: {
            // Five-point star: outer radius r, inner radius 0.4 r.
            float r = std::sqrt(dy * dy + dx * dx);
            if (r > s.radius) return false;
            float inner = 0.4f * s.radius;
            if (r <= inner) return true;
            float ang = std::atan2(dx, -dy); // 0 at the up-pointing tip
            if (ang < 0) ang += 6.2831853f;
            float sector = 6.2831853f / 5.0f;
            float local = std::fmod(ang + sector / 2.0f, sector) - sector / 2.0f;
            // Edge from outer tip (angle 0) to inner vertex (angle sector/2).
            float t = std::fabs(local) / (sector / 2.0f);
            float edge = s.radius + t * (inner - s.radius);
            return r <= edge;
        }
    }
    return false;
}

} // namespace

SceneSpec generate_scene(uint64_t rng_seed) {
    Rng rng(mix_seed(rng_seed, 0x5ce9e5));
    SceneSpec s;
    s.shape = static_cast<Shape>(rng.uniform_int(kNumShapes));
    s.shape_color = static_cast<int>(rng.uniform_int(kNumColors));
    s.background_color = static_cast<int>(rng.uniform_int(kNumColors - 1));
    if (s.background_color >= s.shape_color) ++s.background_color;
    // Rejection sampling keeps the joint (center, radius) uniform over the
    // legal region.
    for (;;) {
        s.center_row = static_cast<float>(rng.uniform(0.2, 0.8));
        s.center_col = static_cast<float>(rng.uniform(0.2, 0.8));
        s.radius = static_cast<float>(rng.uniform(0.1, 0.3));
        if (scene_fits(s.center_row, s.center_col, s.radius)) break;
    }
    return s;
}

ImageCaptionRecord render(const SceneSpec& scene, int size) {
    if (size < 16) throw std::invalid_argument("render: size must be >= 16");
    const NamedColor fg = named_colors()[scene.shape_color];
    const NamedColor bg = named_colors()[scene.background_color];

    ImageCaptionRecord rec;
    rec.image = Tensor({size, size, 3});
    rec.gt_mask = Tensor({size, size});
    rec.caption = scene.caption();
    rec.scene = scene;

    const int ss = 4; // supersampling grid per axis
    float inv = 1.0f / static_cast<float>(size);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            float cy = (static_cast<float>(y) + 0.5f) * inv;
            float cx = (static_cast<float>(x) + 0.5f) * inv;
            bool center_in = inside_shape(scene, cy, cx);
            float cover;
            if (center_in) {
                cover = 1.0f; // interior pixels carry the exact color
            } else {
                int hits = 0;
                for (int sy = 0; sy < ss; ++sy)
                    for (int sx = 0; sx < ss; ++sx) {
                        float py = (static_cast<float>(y) + (sy + 0.5f) / ss) * inv;
                        float px = (static_cast<float>(x) + (sx + 0.5f) / ss) * inv;
                        if (inside_shape(scene, py, px)) ++hits;
                    }
                cover = static_cast<float>(hits) / (ss * ss);
            }
            int64_t base = (static_cast<int64_t>(y) * size + x) * 3;
            rec.image[base + 0] = cover * fg.r + (1.0f - cover) * bg.r;
            rec.image[base + 1] = cover * fg.g + (1.0f - cover) * bg.g;
            rec.image[base + 2] = cover * fg.b + (1.0f - cover) * bg.b;
            rec.gt_mask.at(y, x) = center_in ? 1.0f : 0.0f;
        }
    }
    return rec;
}

SceneSpec parse_caption(const std::string& caption) {
    std::vector<std::string> t = tokenize(caption);
    if (t.size() != 7 || t[0] != "a" || t[3] != "on" || t[4] != "a" || t[6] != "background")
        throw DataError("caption does not match the scene template: '" + caption + "'");
    SceneSpec s;
    int fg = color_index(t[1]);
    int bg = color_index(t[5]);
    if (fg < 0) throw DataError("unknown color '" + t[1] + "' in caption");
    if (bg < 0) throw DataError("unknown color '" + t[5] + "' in caption");
    int shape = -1;
    for (int i = 0; i < kNumShapes; ++i)
        if (t[2] == shape_names()[i]) shape = i;
    if (shape < 0) throw DataError("unknown shape '" + t[2] + "' in caption");
    if (fg == bg) throw DataError("caption repeats the same color for shape and background");
    s.shape = static_cast<Shape>(shape);
    s.shape_color = fg;
    s.background_color = bg;
    return s;
}

std::vector<ImageCaptionRecord> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    fs::path base = fs::path(path).parent_path();
    std::vector<ImageCaptionRecord> records;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("manifest: invalid JSON: ") + e.what(), lineno);
        }
        if (!obj.contains("image_path"))
            throw ParseError("manifest: missing \"image_path\"", lineno);
        if (!obj.contains("caption"))
            throw ParseError("manifest: missing \"caption\"", lineno);
        std::string caption = obj["caption"].get<std::string>();
        if (caption.empty()) throw ParseError("manifest: empty caption", lineno);

        auto resolve = [&](const std::string& p) {
            fs::path q(p);
            return q.is_absolute() ? q.string() : (base / q).string();
        };
        ImageCaptionRecord rec;
        rec.image = read_png_rgb(resolve(obj["image_path"].get<std::string>()));
        rec.caption = caption;
        if (obj.contains("mask_path") && !obj["mask_path"].is_null())
            rec.gt_mask = read_png_mask(resolve(obj["mask_path"].get<std::string>()));
        // Synthetic records regain their scene when the caption parses.
        try {
            rec.scene = parse_caption(caption);
        } catch (const DataError&) {
            rec.scene = std::nullopt;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

class DefaultRefiner : public CaptionRefiner {
public:
    std::string refine(const ImageCaptionRecord& record) const override {
        if (record.scene) return record.caption; // synthetic captions are already clean
        return detokenize(tokenize(record.caption));
    }
};

} // namespace

const CaptionRefiner& default_refiner() {
    static DefaultRefiner refiner;
    return refiner;
}

std::string refine_caption(const ImageCaptionRecord& record, const CaptionRefiner& refiner) {
    std::string out;
    try {
        out = refiner.refine(record);
    } catch (const std::exception& e) {
        throw AdapterError(std::string("caption refiner failed: ") + e.what());
    }
    if (out.empty() || tokenize(out).empty())
        throw AdapterError("caption refiner returned an empty caption");
    return out;
}

std::vector<ImageCaptionRecord> generate_corpus(uint64_t master_seed, int count, int size) {
    std::vector<ImageCaptionRecord> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(render(generate_scene(mix_seed(master_seed, 0xc0bb5, static_cast<uint64_t>(i))), size));
    return out;
}

std::string write_corpus(const std::vector<ImageCaptionRecord>& corpus, const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory: " + out_dir);
    fs::path manifest = dir / "manifest.jsonl";
    std::ofstream out(manifest);
    if (!out) throw IoError("cannot write manifest: " + manifest.string());
    char name[32];
    for (size_t i = 0; i < corpus.size(); ++i) {
        std::snprintf(name, sizeof(name), "img_%05zu.png", i);
        std::string img_name = name;
        std::snprintf(name, sizeof(name), "mask_%05zu.png", i);
        std::string mask_name = name;
        write_png_rgb((dir / img_name).string(), corpus[i].image);
        nlohmann::json line;
        line["image_path"] = img_name;
        line["caption"] = corpus[i].caption;
        if (!corpus[i].gt_mask.empty()) {
            write_png_gray((dir / mask_name).string(), corpus[i].gt_mask);
            line["mask_path"] = mask_name;
        }
        out << line.dump() << "\n";
    }
    return manifest.string();
}

} // namespace ledit
