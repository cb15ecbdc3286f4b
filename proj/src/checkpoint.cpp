#include "ledit/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ledit/common.hpp"

namespace fs = std::filesystem;

namespace ledit {

namespace {

void write_f32(const std::string& path, const Tensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write tensor file: " + path);
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * 4));
    if (!out) throw IoError("short write: " + path);
}

Tensor read_f32(const std::string& path, const std::vector<int>& shape) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read tensor file: " + path);
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * 4));
    if (in.gcount() != t.size() * 4) throw IoError("truncated tensor file: " + path);
    return t;
}

nlohmann::json tensor_entry(const NamedTensor& nt, const std::string& subdir) {
    nlohmann::json e;
    e["name"] = nt.name;
    e["shape"] = nt.tensor.shape();
    e["file"] = subdir + "/" + nt.name + ".f32";
    return e;
}

void save_group(const fs::path& dir, const std::vector<NamedTensor>& group,
                const std::string& subdir) {
    fs::create_directories(dir / subdir);
    for (const auto& nt : group) write_f32((dir / subdir / (nt.name + ".f32")).string(), nt.tensor);
}

std::vector<NamedTensor> load_group(const fs::path& dir, const nlohmann::json& entries) {
    std::vector<NamedTensor> group;
    for (const auto& e : entries) {
        NamedTensor nt;
        nt.name = e.at("name").get<std::string>();
        std::vector<int> shape = e.at("shape").get<std::vector<int>>();
        nt.tensor = read_f32((dir / e.at("file").get<std::string>()).string(), shape);
        group.push_back(std::move(nt));
    }
    return group;
}

} // namespace

void save_checkpoint(const std::string& dir, const Checkpoint& ckpt) {
    fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);
    if (ec) throw IoError("cannot create checkpoint directory: " + dir);

    save_group(base, ckpt.params, "params");
    save_group(base, ckpt.opt, "opt");

    nlohmann::json manifest;
    manifest["schema_version"] = 1;
    manifest["params"] = nlohmann::json::array();
    for (const auto& nt : ckpt.params) manifest["params"].push_back(tensor_entry(nt, "params"));
    manifest["opt"] = nlohmann::json::array();
    for (const auto& nt : ckpt.opt) manifest["opt"].push_back(tensor_entry(nt, "opt"));

    std::ofstream mf(base / "manifest.json");
    if (!mf) throw IoError("cannot write manifest: " + dir);
    mf << manifest.dump(2) << "\n";
    std::ofstream hf(base / "header.json");
    if (!hf) throw IoError("cannot write header: " + dir);
    hf << ckpt.header.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& dir) {
    fs::path base(dir);
    std::ifstream hf(base / "header.json");
    if (!hf) throw IoError("missing checkpoint header: " + (base / "header.json").string());
    std::ifstream mf(base / "manifest.json");
    if (!mf) throw IoError("missing checkpoint manifest: " + (base / "manifest.json").string());
    Checkpoint ckpt;
    try {
        ckpt.header = nlohmann::json::parse(hf);
        nlohmann::json manifest = nlohmann::json::parse(mf);
        ckpt.params = load_group(base, manifest.at("params"));
        ckpt.opt = load_group(base, manifest.at("opt"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint metadata: ") + e.what());
    }
    return ckpt;
}

uint64_t checkpoint_hash(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    uint64_t h = 1469598103934665603ULL;
    for (const auto& f : files) {
        std::string rel = fs::relative(f, dir).string();
        for (unsigned char c : rel) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        std::ifstream in(f, std::ios::binary);
        char buf[4096];
        while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
            for (std::streamsize i = 0; i < in.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 1099511628211ULL;
            }
            if (in.gcount() < static_cast<std::streamsize>(sizeof(buf))) break;
        }
    }
    return h;
}

} // namespace ledit
