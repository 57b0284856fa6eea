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

#pragma once

#include <cstddef>
#include <vector>

#include "irsma/types.hpp"

namespace irsma
{
    // Planar reflecting surface in the yOz plane, centered at the origin.
    //
    // Elements sit on a centered lattice: along y the offsets are (i - (count_y - 1) / 2) * spacing for
    // i = 0 .. count_y - 1, likewise along z. Odd counts therefore give the integer index set {0, +-1, ...}.
    // Elements are flattened m_z-major: flat index m = iz * count_y + iy. Every module uses this ordering.
    class IrsGeometry
    {
    public:
        IrsGeometry(std::size_t count_y, std::size_t count_z, double element_spacing);

        std::size_t count_y() const { return count_y_; }
        std::size_t count_z() const { return count_z_; }
        std::size_t size() const { return count_y_ * count_z_; }
        double element_spacing() const { return spacing_; }

        // Aperture sqrt(My^2 + Mz^2) * d
        double aperture() const;

        const Vec3 &element(std::size_t m) const { return elements_[m]; }
        const std::vector<Vec3> &elements() const { return elements_; }

    private:
        std::size_t count_y_;
        std::size_t count_z_;
        double spacing_;
        std::vector<Vec3> elements_;
    };

    // 1D segment C_t = { center + s * axis : |s| <= length / 2 }.
    class TransmitRegion
    {
    public:
        TransmitRegion(const Vec3 &center, const Vec3 &axis, double length);

        const Vec3 &center() const { return center_; }
        const Vec3 &axis() const { return axis_; }
        double length() const { return length_; }

        Vec3 point_at(double offset) const { return center_ + offset * axis_; }
        double offset_of(const Vec3 &p) const { return (p - center_).dot(axis_); }

        // Membership up to `tol` metres along and off the axis.
        bool contains(const Vec3 &p, double tol = 1e-9) const;

        // Closest point of the segment to q (orthogonal projection clamped to the end points).
        Vec3 nearest_point(const Vec3 &q) const;

    private:
        Vec3 center_;
        Vec3 axis_;
        double length_;
    };

    // Antenna position vector: one 3D position per movable antenna.
    struct Apv
    {
        std::vector<Vec3> positions;

        std::size_t size() const { return positions.size(); }
        const Vec3 &operator[](std::size_t n) const { return positions[n]; }
        Vec3 &operator[](std::size_t n) { return positions[n]; }

        double min_pairwise_distance() const;

        // In-region and minimum-spacing check with a small metric tolerance.
        bool is_feasible(const TransmitRegion &region, double min_spacing, double tol = 1e-9) const;
    };

    // N antennas spaced by `spacing`, symmetric about the region center.
    Apv uniform_linear_layout(const TransmitRegion &region, std::size_t count, double spacing);

    // Uniform discretisation of the transmit region.
    //
    // The region is split into `intervals = max(1, round(A / nominal_spacing))` equal intervals of width
    // A / intervals; points are placed at both end points and every interval boundary, so the grid has
    // intervals + 1 points ordered along the axis and always contains both ends of the segment.
    class SamplingGrid
    {
    public:
        SamplingGrid(const TransmitRegion &region, double nominal_spacing, double min_spacing);

        // Explicit points along the region axis (sorted ascending by offset), e.g. for antenna selection.
        SamplingGrid(const TransmitRegion &region, std::vector<double> offsets, double min_spacing);

        std::size_t size() const { return points_.size(); }
        const Vec3 &point(std::size_t l) const { return points_[l]; }
        const std::vector<Vec3> &points() const { return points_; }
        double offset(std::size_t l) const { return offsets_[l]; }

        // Spacing between neighbouring points; for explicit grids the smallest neighbour gap.
        double spacing() const { return spacing_; }

        // Smallest index gap that guarantees the metric minimum spacing: ceil(D_min / spacing).
        std::size_t min_index_gap() const { return min_gap_; }

        Apv apv_from_indices(const std::vector<std::size_t> &indices) const;

    private:
        std::vector<Vec3> points_;
        std::vector<double> offsets_;
        double spacing_;
        std::size_t min_gap_;
    };
}
