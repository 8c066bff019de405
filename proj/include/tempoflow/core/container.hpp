#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <json.hpp>

#include "tempoflow/core/grid.hpp"

namespace tempoflow {

/// "F4D v1" on-disk container: a directory holding manifest.json plus one raw
/// little-endian, C-order payload file per array. Complex values are stored as
/// interleaved (re, im) float pairs. No compression.
namespace f4d {

struct ArrayRecord {
    std::string name;
    std::string dtype;  // "f32" | "f64" | "c64" | "u8"
    std::vector<std::size_t> shape;
    std::vector<char> bytes;
};

inline std::size_t dtype_size(const std::string& dtype) {
    if (dtype == "f32") return 4;
    if (dtype == "f64") return 8;
    if (dtype == "c64") return 8;
    if (dtype == "u8") return 1;
    throw std::runtime_error("f4d: unsupported dtype '" + dtype + "'");
}

template <typename T>
struct dtype_of;
template <> struct dtype_of<float> { static constexpr const char* value = "f32"; };
template <> struct dtype_of<double> { static constexpr const char* value = "f64"; };
template <> struct dtype_of<std::complex<float>> { static constexpr const char* value = "c64"; };
template <> struct dtype_of<std::uint8_t> { static constexpr const char* value = "u8"; };

template <typename T>
ArrayRecord make_record(const std::string& name, const NdArray<T>& arr) {
    ArrayRecord rec;
    rec.name = name;
    rec.dtype = dtype_of<T>::value;
    rec.shape = arr.shape();
    rec.bytes.resize(arr.size() * sizeof(T));
    std::memcpy(rec.bytes.data(), arr.data(), rec.bytes.size());
    return rec;
}

template <typename T>
NdArray<T> as_array(const ArrayRecord& rec) {
    if (rec.dtype != dtype_of<T>::value)
        throw std::runtime_error("f4d: array '" + rec.name + "' has dtype " + rec.dtype +
                                 ", requested " + dtype_of<T>::value);
    NdArray<T> out(rec.shape);
    std::memcpy(out.data(), rec.bytes.data(), rec.bytes.size());
    return out;
}

class Container {
public:
    template <typename T>
    void add(const std::string& name, const NdArray<T>& arr) {
        require(!arrays_.count(name), "f4d: duplicate array name '" + name + "'");
        order_.push_back(name);
        arrays_.emplace(name, make_record(name, arr));
    }

    bool has(const std::string& name) const { return arrays_.count(name) != 0; }

    const ArrayRecord& record(const std::string& name) const {
        auto it = arrays_.find(name);
        if (it == arrays_.end()) throw std::runtime_error("f4d: no array named '" + name + "'");
        return it->second;
    }

    template <typename T>
    NdArray<T> get(const std::string& name) const {
        return as_array<T>(record(name));
    }

    const std::vector<std::string>& names() const { return order_; }

    nlohmann::json meta;  // free-form metadata, stored in the manifest

private:
    std::vector<std::string> order_;
    std::map<std::string, ArrayRecord> arrays_;

    friend void save(const Container&, const std::filesystem::path&);
    friend Container load(const std::filesystem::path&);
};

inline void save(const Container& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["arrays"] = nlohmann::json::array();
    for (const auto& name : c.order_) {
        const ArrayRecord& rec = c.arrays_.at(name);
        const std::string file = rec.name + ".raw";
        manifest["arrays"].push_back({{"name", rec.name},
                                      {"dtype", rec.dtype},
                                      {"shape", rec.shape},
                                      {"order", "C"},
                                      {"file", file}});
        std::ofstream raw(dir / file, std::ios::binary | std::ios::trunc);
        require(raw.good(), "f4d: cannot open " + (dir / file).string() + " for writing");
        raw.write(rec.bytes.data(), static_cast<std::streamsize>(rec.bytes.size()));
        require(raw.good(), "f4d: short write to " + (dir / file).string());
    }
    if (!c.meta.is_null()) manifest["meta"] = c.meta;
    std::ofstream mf(dir / "manifest.json", std::ios::trunc);
    require(mf.good(), "f4d: cannot write manifest in " + dir.string());
    mf << manifest.dump(2) << "\n";
}

inline Container load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream mf(manifest_path);
    if (!mf.good()) throw std::runtime_error("f4d: missing manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("f4d: corrupt manifest " + manifest_path.string() + ": " + e.what());
    }
    if (!manifest.contains("version") || manifest["version"].get<int>() != 1)
        throw std::runtime_error("f4d: unsupported container version in " + manifest_path.string());
    if (!manifest.contains("arrays") || !manifest["arrays"].is_array())
        throw std::runtime_error("f4d: corrupt manifest (no arrays) in " + manifest_path.string());

    Container c;
    for (const auto& entry : manifest["arrays"]) {
        ArrayRecord rec;
        rec.name = entry.at("name").get<std::string>();
        rec.dtype = entry.at("dtype").get<std::string>();
        rec.shape = entry.at("shape").get<std::vector<std::size_t>>();
        const std::string file = entry.at("file").get<std::string>();
        const std::size_t expected = NdArray<char>::count(rec.shape) * dtype_size(rec.dtype);

        std::ifstream raw(dir / file, std::ios::binary | std::ios::ate);
        if (!raw.good()) throw std::runtime_error("f4d: missing payload " + (dir / file).string());
        const auto actual = static_cast<std::size_t>(raw.tellg());
        if (actual != expected)
            throw std::runtime_error("f4d: shape/dtype mismatch for '" + rec.name + "': manifest implies " +
                                     std::to_string(expected) + " bytes, payload has " + std::to_string(actual));
        rec.bytes.resize(expected);
        raw.seekg(0);
        raw.read(rec.bytes.data(), static_cast<std::streamsize>(expected));
        require(raw.good(), "f4d: short read from " + (dir / file).string());

        c.order_.push_back(rec.name);
        c.arrays_.emplace(rec.name, std::move(rec));
    }
    if (manifest.contains("meta")) c.meta = manifest["meta"];
    return c;
}

} // namespace f4d

/// Field <-> container helpers shared by every pipeline stage.
inline f4d::Container to_container(const VelocityField4D& field) {
    f4d::Container c;
    c.add("v", field.v);
    c.add("magnitude", field.magnitude);
    c.add("fluid_mask", field.fluid_mask);
    c.meta["grid"] = {{"nx", field.grid.nx}, {"ny", field.grid.ny}, {"nz", field.grid.nz},
                      {"nt", field.grid.nt}, {"dx", field.grid.dx}, {"dt", field.grid.dt}};
    return c;
}

inline VelocityField4D field_from_container(const f4d::Container& c) {
    VelocityField4D f;
    const auto& g = c.meta.at("grid");
    f.grid = {g.at("nx").get<std::size_t>(), g.at("ny").get<std::size_t>(), g.at("nz").get<std::size_t>(),
              g.at("nt").get<std::size_t>(), g.at("dx").get<double>(), g.at("dt").get<double>()};
    f.v = c.get<float>("v");
    f.magnitude = c.get<float>("magnitude");
    f.fluid_mask = c.get<std::uint8_t>("fluid_mask");
    f.validate();
    return f;
}

} // namespace tempoflow
