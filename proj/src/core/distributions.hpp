// Copyright 2026 The Sonify Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace sonify {

// I_x(a, b), the regularized incomplete beta function, by Lentz's
// continued fraction. Requires a, b > 0 and x in [0, 1].
double IncompleteBeta(double a, double b, double x);

double StudentTCdf(double t, double df);
// P(|T| >= |t|).
double StudentTTwoSided(double t, double df);
// Inverse CDF for p in (0, 1).
double StudentTQuantile(double p, double df);

// P(F >= f) for an F(d1, d2) variable; real-valued degrees of freedom.
double FSurvival(double f, double d1, double d2);

}  // namespace sonify
