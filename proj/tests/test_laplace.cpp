/*
   Copyright 2026 the levydiv authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "levydiv/laplace.hpp"

using namespace levydiv;
using cplx = std::complex<double>;

TEST_CASE("talbot inverts textbook transforms", "[laplace]") {
    auto exp_decay = [](cplx s) { return 1.0 / (s + 1.0); }; // e^{-t}
    auto ramp = [](cplx s) { return 1.0 / (s * s); };        // t
    auto texp = [](cplx s) { return 1.0 / ((s + 1.0) * (s + 1.0)); }; // t e^{-t}
    auto sine = [](cplx s) { return 1.0 / (s * s + 1.0); };  // sin t

    for (double t : {0.25, 1.0, 3.0, 8.0}) {
        CHECK(talbot_invert(exp_decay, t) == Catch::Approx(std::exp(-t)).margin(1e-10));
        CHECK(talbot_invert(ramp, t) == Catch::Approx(t).epsilon(1e-8));
        CHECK(talbot_invert(texp, t) == Catch::Approx(t * std::exp(-t)).margin(1e-10));
        CHECK(talbot_invert(sine, t) == Catch::Approx(std::sin(t)).margin(1e-8));
    }
    CHECK_THROWS_AS(talbot_invert(exp_decay, 0.0), domain_error);
}

TEST_CASE("stehfest inverts smooth monotone transforms", "[laplace]") {
    auto exp_decay = [](double s) { return 1.0 / (s + 1.0); };
    auto ramp = [](double s) { return 1.0 / (s * s); };
    auto texp = [](double s) { return 1.0 / ((s + 1.0) * (s + 1.0)); };

    for (double t : {0.25, 1.0, 3.0}) {
        CHECK(stehfest_invert(exp_decay, t) == Catch::Approx(std::exp(-t)).margin(3e-5));
        CHECK(stehfest_invert(ramp, t) == Catch::Approx(t).epsilon(1e-6));
        CHECK(stehfest_invert(texp, t) == Catch::Approx(t * std::exp(-t)).margin(1e-4));
    }
    CHECK_THROWS_AS(stehfest_invert(exp_decay, 1.0, 13), domain_error);
}

TEST_CASE("talbot and stehfest agree with each other", "[laplace]") {
    auto f = [](double s) { return 1.0 / ((s + 0.5) * (s + 2.0)); };
    auto fc = [](cplx s) { return 1.0 / ((s + 0.5) * (s + 2.0)); };
    for (double t : {0.5, 1.5, 4.0}) {
        double a = talbot_invert(fc, t);
        double b = stehfest_invert(f, t);
        CHECK(a == Catch::Approx(b).margin(5e-5));
    }
}
