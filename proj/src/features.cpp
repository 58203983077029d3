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

#include "voxal/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "voxal/kvfile.hpp"

namespace voxal {

namespace {

// Half-sample symmetric reflection (−1 -> 0, n -> n−1), repeated until the
// index lands inside [0, n). Handles kernels wider than the axis.
int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        const double w = std::exp(-(static_cast<double>(j) * j) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(j + radius)] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

// Convolves along one axis (0=x, 1=y, 2=z) with reflected borders.
void convolve_axis(const Volume& in, Volume& out, int axis, const std::vector<double>& kernel) {
    const int nx = in.dims[0], ny = in.dims[1], nz = in.dims[2];
    const int radius = static_cast<int>(kernel.size() / 2);
    const int extent = in.dims[static_cast<std::size_t>(axis)];
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                double acc = 0.0;
                for (int j = -radius; j <= radius; ++j) {
                    int xx = x, yy = y, zz = z;
                    int* coord = axis == 0 ? &xx : axis == 1 ? &yy : &zz;
                    *coord = reflect(*coord + j, extent);
                    acc += kernel[static_cast<std::size_t>(j + radius)] *
                           in.at(xx, yy, zz);
                }
                out.at(x, y, z) = static_cast<float>(acc);
            }
}

}  // namespace

void FeatureConfig::validate() const {
    if (histogram_bins < 1) throw std::invalid_argument("histogram_bins must be positive");
    for (double s : gaussian_sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
    for (double s : log_sigmas)
        if (!(s > 0.0)) throw std::invalid_argument("LoG sigma must be positive");
}

std::size_t FeatureConfig::dimension() const {
    return 2 + static_cast<std::size_t>(histogram_bins) + gaussian_sigmas.size() + 1 +
           log_sigmas.size() + 1;
}

Volume gaussian_smooth(const Volume& volume, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    const std::vector<double> kernel = gaussian_kernel(sigma);
    Volume a = volume;
    Volume b = volume;
    convolve_axis(a, b, 0, kernel);
    convolve_axis(b, a, 1, kernel);
    if (volume.dims[2] > 1) {
        convolve_axis(a, b, 2, kernel);
        return b;
    }
    return a;
}

Volume gradient_magnitude(const Volume& volume) {
    const int nx = volume.dims[0], ny = volume.dims[1], nz = volume.dims[2];
    Volume out = volume;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const double gx = 0.5 * (volume.at(reflect(x + 1, nx), y, z) -
                                         volume.at(reflect(x - 1, nx), y, z));
                const double gy = 0.5 * (volume.at(x, reflect(y + 1, ny), z) -
                                         volume.at(x, reflect(y - 1, ny), z));
                double gz = 0.0;
                if (nz > 1)
                    gz = 0.5 * (volume.at(x, y, reflect(z + 1, nz)) -
                                volume.at(x, y, reflect(z - 1, nz)));
                out.at(x, y, z) = static_cast<float>(std::sqrt(gx * gx + gy * gy + gz * gz));
            }
    return out;
}

Volume laplacian_of_gaussian(const Volume& volume, double sigma) {
    const Volume s = gaussian_smooth(volume, sigma);
    const int nx = s.dims[0], ny = s.dims[1], nz = s.dims[2];
    Volume out = s;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                double lap = s.at(reflect(x + 1, nx), y, z) + s.at(reflect(x - 1, nx), y, z) -
                             2.0 * s.at(x, y, z);
                lap += s.at(x, reflect(y + 1, ny), z) + s.at(x, reflect(y - 1, ny), z) -
                       2.0 * s.at(x, y, z);
                if (nz > 1)
                    lap += s.at(x, y, reflect(z + 1, nz)) + s.at(x, y, reflect(z - 1, nz)) -
                           2.0 * s.at(x, y, z);
                out.at(x, y, z) = static_cast<float>(lap);
            }
    return out;
}

FeatureMatrix compute_features(const Volume& volume, const SupervoxelPartition& partition,
                               const FeatureConfig& config) {
    volume.validate();
    config.validate();
    if (partition.assignment.size() != volume.data.size())
        throw std::invalid_argument("partition does not match volume dims");

    const std::size_t n = partition.count;
    const int bins = config.histogram_bins;

    FeatureMatrix m;
    m.rows = n;
    m.cols = config.dimension();
    m.values.assign(m.rows * m.cols, 0.0);

    m.names = {"mean", "std"};
    for (int b = 0; b < bins; ++b) {
        std::string name = "hist_";
        if (b < 10) name += '0';
        name += std::to_string(b);
        m.names.push_back(name);
    }
    for (double s : config.gaussian_sigmas) m.names.push_back("gauss_" + format_double(s));
    m.names.push_back("grad");
    for (double s : config.log_sigmas) m.names.push_back("log_" + format_double(s));
    m.names.push_back("radius");

    // Column offsets inside a row.
    const std::size_t col_hist = 2;
    const std::size_t col_gauss = col_hist + static_cast<std::size_t>(bins);
    const std::size_t col_grad = col_gauss + config.gaussian_sigmas.size();
    const std::size_t col_log = col_grad + 1;
    const std::size_t col_radius = col_log + config.log_sigmas.size();

    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
    for (std::size_t v = 0; v < volume.data.size(); ++v) {
        const std::uint32_t id = partition.assignment[v];
        const double x = volume.data[v];
        sum[id] += x;
        sum_sq[id] += x * x;

        const double clamped = std::clamp(x, 0.0, 1.0);
        int bin = static_cast<int>(clamped * bins);
        bin = std::min(bin, bins - 1);
        m.row(id)[col_hist + static_cast<std::size_t>(bin)] += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / partition.sizes[i];
        const double mean = sum[i] * inv;
        const double var = std::max(0.0, sum_sq[i] * inv - mean * mean);
        m.row(i)[0] = mean;
        m.row(i)[1] = std::sqrt(var);
        for (int b = 0; b < bins; ++b) m.row(i)[col_hist + static_cast<std::size_t>(b)] *= inv;
        m.row(i)[col_radius] = partition.radii[i];
    }

    auto accumulate_mean = [&](const Volume& derived, std::size_t col) {
        std::vector<double> acc(n, 0.0);
        for (std::size_t v = 0; v < derived.data.size(); ++v)
            acc[partition.assignment[v]] += derived.data[v];
        for (std::size_t i = 0; i < n; ++i) m.row(i)[col] = acc[i] / partition.sizes[i];
    };

    for (std::size_t s = 0; s < config.gaussian_sigmas.size(); ++s)
        accumulate_mean(gaussian_smooth(volume, config.gaussian_sigmas[s]), col_gauss + s);
    accumulate_mean(gradient_magnitude(volume), col_grad);
    for (std::size_t s = 0; s < config.log_sigmas.size(); ++s)
        accumulate_mean(laplacian_of_gaussian(volume, config.log_sigmas[s]), col_log + s);

    for (double v : m.values)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value");
    return m;
}

void save_features_csv(const FeatureMatrix& features, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write features csv: " + path.string());
    out << "id";
    for (const std::string& name : features.names) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < features.rows; ++r) {
        out << r;
        for (std::size_t c = 0; c < features.cols; ++c)
            out << ',' << format_double(features.at(r, c));
        out << '\n';
    }
    if (!out) throw std::runtime_error("features csv write failed");
}

}  // namespace voxal
