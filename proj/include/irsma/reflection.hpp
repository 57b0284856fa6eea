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

#include <cmath>

#include "irsma/rng.hpp"
#include "irsma/types.hpp"

namespace irsma
{
    // IRS passive beamforming vector phi = [e^{j phi_1}, ..., e^{j phi_M}]^T.
    // Entries are kept on the unit circle; construction from arbitrary complex values normalises them.
    class Reflection
    {
    public:
        Reflection() = default;

        static Reflection from_phases(const RVec &phases)
        {
            Reflection r;
            r.coeffs_.resize(phases.size());
            for (Eigen::Index m = 0; m < phases.size(); ++m)
                r.coeffs_[m] = std::polar(1.0, phases[m]);
            return r;
        }

        // Entries must be non-zero; each is divided by its modulus.
        static Reflection from_coefficients(const CVec &values)
        {
            Reflection r;
            r.coeffs_.resize(values.size());
            for (Eigen::Index m = 0; m < values.size(); ++m)
            {
                const double a = std::abs(values[m]);
                if (!(a > 0.0) || !std::isfinite(a))
                    throw degenerate_retraction("Reflection: zero or non-finite coefficient");
                r.coeffs_[m] = values[m] / a;
            }
            return r;
        }

        static Reflection identity(Eigen::Index size)
        {
            Reflection r;
            r.coeffs_ = CVec::Ones(size);
            return r;
        }

        static Reflection random(Rng &rng, Eigen::Index size)
        {
            Reflection r;
            r.coeffs_.resize(size);
            for (Eigen::Index m = 0; m < size; ++m)
                r.coeffs_[m] = random_unit_phase(rng);
            return r;
        }

        Eigen::Index size() const { return coeffs_.size(); }
        const CVec &coefficients() const { return coeffs_; }
        cplx operator[](Eigen::Index m) const { return coeffs_[m]; }

        // Phases wrapped to [0, 2 pi).
        RVec phases() const
        {
            RVec p(coeffs_.size());
            for (Eigen::Index m = 0; m < coeffs_.size(); ++m)
            {
                double a = std::arg(coeffs_[m]);
                if (a < 0.0)
                    a += 2.0 * pi;
                if (a >= 2.0 * pi)
                    a -= 2.0 * pi;
                p[m] = a;
            }
            return p;
        }

        void set_phase(Eigen::Index m, double phase) { coeffs_[m] = std::polar(1.0, phase); }

        double max_modulus_error() const
        {
            double e = 0.0;
            for (Eigen::Index m = 0; m < coeffs_.size(); ++m)
                e = std::max(e, std::abs(std::abs(coeffs_[m]) - 1.0));
            return e;
        }

    private:
        CVec coeffs_;
    };
}
