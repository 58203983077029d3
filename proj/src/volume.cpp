// Copyright 2026 the voxal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxal/volume.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "voxal/kvfile.hpp"
#include "voxal/rng.hpp"

namespace voxal {

namespace {

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open raw file: " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw std::runtime_error("read failed: " + path.string());
    return bytes;
}

void write_binary(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write raw file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

float f32_from_le(const std::uint8_t* p) {
    const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            (static_cast<std::uint32_t>(p[1]) << 8) |
                            (static_cast<std::uint32_t>(p[2]) << 16) |
                            (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(u);
}

void f32_to_le(float v, std::uint8_t* p) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(v);
    p[0] = static_cast<std::uint8_t>(u & 0xff);
    p[1] = static_cast<std::uint8_t>((u >> 8) & 0xff);
    p[2] = static_cast<std::uint8_t>((u >> 16) & 0xff);
    p[3] = static_cast<std::uint8_t>((u >> 24) & 0xff);
}

}  // namespace

void Volume::validate() const {
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("volume dims must be positive");
    for (double s : spacing)
        if (!(s > 0.0)) throw std::invalid_argument("volume spacing must be positive");
    if (static_cast<std::int64_t>(data.size()) != voxel_count())
        throw std::invalid_argument("volume data length does not match dims");
    for (float v : data)
        if (!std::isfinite(v)) throw std::invalid_argument("volume contains non-finite intensity");
}

void LabelVolume::validate(const std::array<int, 3>& volume_dims) const {
    if (dims != volume_dims)
        throw std::invalid_argument("label dims do not match paired volume");
    if (static_cast<std::int64_t>(labels.size()) != voxel_count())
        throw std::invalid_argument("label data length does not match dims");
    for (std::uint8_t v : labels)
        if (v > 1) throw std::invalid_argument("label value outside {0,1}");
}

void SyntheticConfig::validate() const {
    for (int d : dims)
        if (d < 1) throw std::invalid_argument("synthetic dims must be positive");
    if (blob_count < 1) throw std::invalid_argument("blob_count must be positive");
    if (!(blob_radius_min > 0.0) || blob_radius_max < blob_radius_min)
        throw std::invalid_argument("blob radius range must satisfy 0 < min <= max");
    // For 2D phantoms (depth one) the fit constraint applies in-plane only.
    int min_dim = std::min(dims[0], dims[1]);
    if (dims[2] > 1) min_dim = std::min(min_dim, dims[2]);
    if (!(blob_radius_max < min_dim / 2.0))
        throw std::invalid_argument("blob_radius_max must be below half the smallest extent");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be nonnegative");
    if (fg_intensity == bg_intensity)
        throw std::invalid_argument("fg and bg intensities must differ");
}

Dataset load_dataset(const std::filesystem::path& header_path) {
    const KeyValueFile kv = KeyValueFile::load(header_path);
    const std::filesystem::path dir = header_path.parent_path();

    Dataset ds;
    const auto dims = parse_ints(kv.get("dims"), 3);
    for (int a = 0; a < 3; ++a) ds.volume.dims[a] = static_cast<int>(dims[a]);
    const auto spacing = parse_doubles(kv.get_or("spacing", "1 1 1"), 3);
    for (int a = 0; a < 3; ++a) ds.volume.spacing[a] = spacing[a];

    const std::string dtype = kv.get("dtype");
    if (dtype != "u8" && dtype != "f32")
        throw std::runtime_error("unsupported dtype: " + dtype);

    const std::int64_t n = static_cast<std::int64_t>(ds.volume.dims[0]) * ds.volume.dims[1] *
                           ds.volume.dims[2];
    if (n <= 0) throw std::runtime_error("header declares non-positive dims");

    const auto raw = read_binary(dir / kv.get("data"));
    const std::size_t bytes_per_voxel = dtype == "u8" ? 1 : 4;
    if (raw.size() != static_cast<std::size_t>(n) * bytes_per_voxel)
        throw std::runtime_error("raw data byte length does not match dims");

    ds.volume.data.resize(static_cast<std::size_t>(n));
    if (dtype == "u8") {
        for (std::int64_t i = 0; i < n; ++i)
            ds.volume.data[static_cast<std::size_t>(i)] = raw[static_cast<std::size_t>(i)] / 255.0f;
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            ds.volume.data[static_cast<std::size_t>(i)] =
                f32_from_le(raw.data() + static_cast<std::size_t>(i) * 4);
    }
    ds.volume.validate();

    if (kv.has("labels")) {
        LabelVolume lv;
        lv.dims = ds.volume.dims;
        lv.labels = read_binary(dir / kv.get("labels"));
        lv.validate(ds.volume.dims);
        ds.labels = std::move(lv);
    }
    return ds;
}

void save_dataset(const Volume& volume, const LabelVolume* labels,
                  const std::filesystem::path& header_path) {
    volume.validate();
    if (labels) labels->validate(volume.dims);

    const std::filesystem::path dir = header_path.parent_path();
    const std::string stem = header_path.stem().string();
    const std::string data_name = stem + ".raw";
    const std::string label_name = stem + "_labels.raw";

    std::vector<std::uint8_t> raw(volume.data.size() * 4);
    for (std::size_t i = 0; i < volume.data.size(); ++i)
        f32_to_le(volume.data[i], raw.data() + i * 4);
    write_binary(dir / data_name, raw);
    if (labels) write_binary(dir / label_name, labels->labels);

    KeyValueFile kv;
    kv.set("dims", std::to_string(volume.dims[0]) + " " + std::to_string(volume.dims[1]) + " " +
                       std::to_string(volume.dims[2]));
    kv.set("spacing", format_double(volume.spacing[0]) + " " + format_double(volume.spacing[1]) +
                          " " + format_double(volume.spacing[2]));
    kv.set("dtype", "f32");
    kv.set("data", data_name);
    if (labels) kv.set("labels", label_name);
    kv.save(header_path);
}

std::pair<Volume, LabelVolume> generate_synthetic(const SyntheticConfig& config) {
    config.validate();

    Volume vol;
    vol.dims = config.dims;
    vol.data.assign(static_cast<std::size_t>(vol.voxel_count()), 0.0f);
    LabelVolume lab;
    lab.dims = config.dims;
    lab.labels.assign(vol.data.size(), 0);

    const int nx = config.dims[0], ny = config.dims[1], nz = config.dims[2];
    const bool flat = nz == 1;
    Rng rng(config.rng_seed);

    for (int b = 0; b < config.blob_count; ++b) {
        const double ax = rng.uniform(config.blob_radius_min, config.blob_radius_max);
        const double ay = rng.uniform(config.blob_radius_min, config.blob_radius_max);
        const double az = flat ? 1.0 : rng.uniform(config.blob_radius_min, config.blob_radius_max);

        auto center_in = [&](double semi, int n) {
            const double lo = std::min(semi, (n - 1) / 2.0);
            const double hi = std::max(n - 1 - semi, (n - 1) / 2.0);
            return rng.uniform(lo, hi);
        };
        const double cx = center_in(ax, nx);
        const double cy = center_in(ay, ny);
        const double cz = flat ? 0.0 : center_in(az, nz);

        const int x0 = std::max(0, static_cast<int>(std::floor(cx - ax)));
        const int x1 = std::min(nx - 1, static_cast<int>(std::ceil(cx + ax)));
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - ay)));
        const int y1 = std::min(ny - 1, static_cast<int>(std::ceil(cy + ay)));
        const int z0 = flat ? 0 : std::max(0, static_cast<int>(std::floor(cz - az)));
        const int z1 = flat ? 0 : std::min(nz - 1, static_cast<int>(std::ceil(cz + az)));

        for (int z = z0; z <= z1; ++z) {
            const double fz = flat ? 0.0 : (z - cz) / az;
            for (int y = y0; y <= y1; ++y) {
                const double fy = (y - cy) / ay;
                for (int x = x0; x <= x1; ++x) {
                    const double fx = (x - cx) / ax;
                    if (fx * fx + fy * fy + fz * fz <= 1.0)
                        lab.labels[lab.index(x, y, z)] = 1;
                }
            }
        }
    }

    const float fg = static_cast<float>(config.fg_intensity);
    const float bg = static_cast<float>(config.bg_intensity);
    if (config.noise_sigma > 0.0) {
        for (std::size_t i = 0; i < vol.data.size(); ++i) {
            const float base = lab.labels[i] ? fg : bg;
            vol.data[i] = base + static_cast<float>(config.noise_sigma * rng.normal());
        }
    } else {
        for (std::size_t i = 0; i < vol.data.size(); ++i)
            vol.data[i] = lab.labels[i] ? fg : bg;
    }

    vol.validate();
    return {std::move(vol), std::move(lab)};
}

}  // namespace voxal
