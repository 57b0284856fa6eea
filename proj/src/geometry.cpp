// SPDX-License-Identifier: Apache-2.0
//
// irsma - IRS-assisted movable-antenna downlink simulation library
// Copyright (C) 2026 The irsma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "irsma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace irsma
{
    IrsGeometry::IrsGeometry(std::size_t count_y, std::size_t count_z, double element_spacing)
        : count_y_(count_y), count_z_(count_z), spacing_(element_spacing)
    {
        if (count_y == 0 || count_z == 0)
            throw invalid_parameter("IrsGeometry: element counts must be positive");
        if (!(element_spacing >= 0.0) || !std::isfinite(element_spacing))
            throw invalid_parameter("IrsGeometry: element spacing must be finite and non-negative");

        elements_.reserve(size());
        const double cy = 0.5 * double(count_y - 1);
        const double cz = 0.5 * double(count_z - 1);
        for (std::size_t iz = 0; iz < count_z; ++iz)
            for (std::size_t iy = 0; iy < count_y; ++iy)
                elements_.emplace_back(0.0, (double(iy) - cy) * spacing_, (double(iz) - cz) * spacing_);
    }

    double IrsGeometry::aperture() const
    {
        const double my = double(count_y_), mz = double(count_z_);
        return std::sqrt(my * my + mz * mz) * spacing_;
    }

    TransmitRegion::TransmitRegion(const Vec3 &center, const Vec3 &axis, double length)
        : center_(center), axis_(axis), length_(length)
    {
        const double n = axis.norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw invalid_parameter("TransmitRegion: axis must be a non-zero finite vector");
        if (std::abs(n - 1.0) > 1e-9)
            throw invalid_parameter("TransmitRegion: axis must have unit norm");
        if (!(length >= 0.0) || !std::isfinite(length))
            throw invalid_parameter("TransmitRegion: length must be finite and non-negative");
        axis_ /= n;
    }

    bool TransmitRegion::contains(const Vec3 &p, double tol) const
    {
        const double s = offset_of(p);
        if (std::abs(s) > 0.5 * length_ + tol)
            return false;
        return (p - point_at(s)).norm() <= tol;
    }

    Vec3 TransmitRegion::nearest_point(const Vec3 &q) const
    {
        const double half = 0.5 * length_;
        return point_at(std::clamp(offset_of(q), -half, half));
    }

    double Apv::min_pairwise_distance() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < positions.size(); ++i)
            for (std::size_t j = i + 1; j < positions.size(); ++j)
                best = std::min(best, (positions[i] - positions[j]).norm());
        return best;
    }

    bool Apv::is_feasible(const TransmitRegion &region, double min_spacing, double tol) const
    {
        for (const auto &p : positions)
            if (!region.contains(p, tol))
                return false;
        return min_pairwise_distance() >= min_spacing - tol;
    }

    Apv uniform_linear_layout(const TransmitRegion &region, std::size_t count, double spacing)
    {
        if (count == 0)
            throw invalid_parameter("uniform_linear_layout: need at least one antenna");
        if (double(count - 1) * spacing > region.length() + 1e-12)
            throw infeasible_spacing("uniform_linear_layout: array does not fit into the transmit region");

        Apv apv;
        apv.positions.reserve(count);
        const double c = 0.5 * double(count - 1);
        for (std::size_t n = 0; n < count; ++n)
            apv.positions.push_back(region.point_at((double(n) - c) * spacing));
        return apv;
    }

    SamplingGrid::SamplingGrid(const TransmitRegion &region, double nominal_spacing, double min_spacing)
    {
        if (!(nominal_spacing > 0.0))
            throw invalid_parameter("SamplingGrid: sample spacing must be positive");
        if (!(min_spacing > 0.0))
            throw invalid_parameter("SamplingGrid: minimum spacing must be positive");

        const double a = region.length();
        const std::size_t intervals = std::max<std::size_t>(1, std::size_t(std::llround(a / nominal_spacing)));
        spacing_ = a / double(intervals);

        offsets_.reserve(intervals + 1);
        points_.reserve(intervals + 1);
        for (std::size_t l = 0; l <= intervals; ++l)
        {
            offsets_.push_back(-0.5 * a + double(l) * spacing_);
            points_.push_back(region.point_at(offsets_.back()));
        }

        // a zero-length region collapses onto a single point
        if (a == 0.0)
        {
            offsets_.resize(1);
            points_.resize(1);
            min_gap_ = 1;
            return;
        }
        min_gap_ = std::max<std::size_t>(1, std::size_t(std::ceil(min_spacing / spacing_ - 1e-9)));
    }

    SamplingGrid::SamplingGrid(const TransmitRegion &region, std::vector<double> offsets, double min_spacing)
        : offsets_(std::move(offsets))
    {
        if (offsets_.empty())
            throw invalid_parameter("SamplingGrid: explicit grid needs at least one point");
        if (!std::is_sorted(offsets_.begin(), offsets_.end()))
            throw invalid_parameter("SamplingGrid: explicit offsets must be sorted");
        if (!(min_spacing > 0.0))
            throw invalid_parameter("SamplingGrid: minimum spacing must be positive");

        spacing_ = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < offsets_.size(); ++l)
        {
            if (std::abs(offsets_[l]) > 0.5 * region.length() + 1e-9)
                throw invalid_parameter("SamplingGrid: explicit offset outside the transmit region");
            points_.push_back(region.point_at(offsets_[l]));
            if (l > 0)
                spacing_ = std::min(spacing_, offsets_[l] - offsets_[l - 1]);
        }
        if (offsets_.size() == 1)
            spacing_ = min_spacing;
        if (!(spacing_ > 0.0))
            throw invalid_parameter("SamplingGrid: explicit offsets must be distinct");
        min_gap_ = std::max<std::size_t>(1, std::size_t(std::ceil(min_spacing / spacing_ - 1e-9)));
    }

    Apv SamplingGrid::apv_from_indices(const std::vector<std::size_t> &indices) const
    {
        Apv apv;
        apv.positions.reserve(indices.size());
        for (auto l : indices)
        {
            if (l >= points_.size())
                throw invalid_parameter("SamplingGrid: index out of range");
            apv.positions.push_back(points_[l]);
        }
        return apv;
    }
}
