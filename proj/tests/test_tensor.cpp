// Copyright 2026 The Stressnet Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stressnet/errors.hpp"
#include "stressnet/random.hpp"
#include "stressnet/tensor.hpp"

using namespace stressnet;

namespace {

Vector random_vector(Rng& rng, std::size_t n, double range) {
    Vector v(n);
    for (double& x : v) x = rng.uniform(-range, range);
    return v;
}

double sum(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("matvec") {
    CHECK(matvec(Matrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
    CHECK(matvec(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}) == Vector{3, 7});
    CHECK(matvec(Matrix(2, 2), Vector{5, 5}) == Vector{0, 0});
    CHECK_THROWS_AS(matvec(Matrix(2, 3), Vector{1, 1}), ShapeError);
}

TEST_CASE("matvec with the identity is exact on random vectors") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(12);
        const Vector v = random_vector(rng, n, 1e3);
        CHECK(matvec(Matrix::identity(n), v) == v);
    }
}

TEST_CASE("matvec_transposed and add_outer") {
    const Matrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(matvec_transposed(m, Vector{1, 1}) == Vector{5, 7, 9});
    Matrix acc(2, 3);
    add_outer(acc, Vector{1, 2}, Vector{1, 0, -1});
    CHECK(acc == Matrix{{1, 0, -1}, {2, 0, -2}});
    CHECK_THROWS_AS(matvec_transposed(m, Vector{1, 1, 1}), ShapeError);
}

TEST_CASE("softmax examples") {
    const Vector half = softmax(Vector{0, 0});
    CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-15));

    for (double c : {-40.0, 0.0, 3.5, 700.0}) {
        const Vector q = softmax(Vector{c, c, c, c});
        for (double x : q) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
    }

    const Vector s = softmax(Vector{1, 2, 3});
    CHECK(s[0] == doctest::Approx(0.09003057).epsilon(1e-7));
    CHECK(s[1] == doctest::Approx(0.24472847).epsilon(1e-7));
    CHECK(s[2] == doctest::Approx(0.66524096).epsilon(1e-7));

    CHECK_THROWS_AS(softmax(Vector{}), ShapeError);
}

TEST_CASE("softmax survives extreme logits") {
    const Vector s = softmax(Vector{700.0, -700.0, 699.0});
    CHECK(all_finite(s.span()));
    CHECK(std::abs(sum(s) - 1.0) < 1e-12);
    CHECK(argmax(s) == 0);
}

TEST_CASE("softmax properties on random inputs") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(10);
        const Vector v = random_vector(rng, n, 20.0);
        const double shift = rng.uniform(-50.0, 50.0);
        const Vector s = softmax(v);
        const Vector shifted = softmax(add(v, Vector(n, shift)));

        CHECK(std::abs(sum(s) - 1.0) <= 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s[i] > 0.0);
            CHECK(std::abs(s[i] - shifted[i]) <= 1e-12);
        }
        CHECK(argmax(s) == argmax(v));
    }
}

TEST_CASE("elementwise operations") {
    CHECK(tanh(Vector{0})[0] == 0.0);
    CHECK(sigmoid(Vector{0})[0] == 0.5);
    CHECK(mul(Vector{1, 2}, Vector{3, 4}) == Vector{3, 8});
    CHECK(add(Vector{1, 2}, Vector{3, 4}) == Vector{4, 6});
    CHECK(sub(Vector{1, 2}, Vector{3, 4}) == Vector{-2, -2});
    CHECK_THROWS_AS(mul(Vector{1}, Vector{1, 2}), ShapeError);
    CHECK_THROWS_AS(add(Vector{1}, Vector{1, 2}), ShapeError);

    Rng rng(3);
    const Vector v = random_vector(rng, 200, 30.0);
    for (double x : tanh(v)) CHECK((x >= -1.0 && x <= 1.0));
    for (double x : sigmoid(v)) CHECK((x >= 0.0 && x <= 1.0));
    const Vector moderate = random_vector(rng, 200, 15.0);
    for (double x : tanh(moderate)) CHECK((x > -1.0 && x < 1.0));
    for (double x : sigmoid(moderate)) CHECK((x > 0.0 && x < 1.0));
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(std::isfinite(sigmoid(-800.0)));
}

TEST_CASE("log_sum_exp matches the direct formula") {
    CHECK(log_sum_exp(Vector{1, 3}) == doctest::Approx(std::log(std::exp(1.0) + std::exp(3.0))));
    CHECK(std::isfinite(log_sum_exp(Vector{1000, 1000})));
}

TEST_CASE("check_gradients: quadratic loss") {
    Rng rng(5);
    Parameter p("p", 6, 1);
    for (double& x : p.value.data()) x = rng.uniform(-3, 3);
    auto loss = [&]() {
        double l = 0.0;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            l += 0.5 * p.value.data()[i] * p.value.data()[i];
            p.grad.data()[i] = p.value.data()[i];
        }
        return l;
    };
    const auto report = check_gradients(loss, views_of({&p}), 1e-5, 1e-7);
    CHECK(report.checked == 6);
    CHECK(report.max_relative_error < 1e-7);
    CHECK(report.passed);
}

TEST_CASE("check_gradients: constant loss") {
    Parameter p("p", 2, 2);
    p.value.fill(1.5);
    auto loss = [&]() {
        p.grad.fill(0.0);
        return 4.0;
    };
    const auto report = check_gradients(loss, views_of({&p}), 1e-5, 1e-7);
    CHECK(report.max_relative_error == 0.0);
    CHECK(report.passed);
}

TEST_CASE("check_gradients flags a wrong gradient and bad inputs") {
    Parameter p("weights", 3, 1);
    p.value.fill(1.0);
    auto wrong = [&]() {
        double l = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            l += p.value.data()[i] * p.value.data()[i];
            p.grad.data()[i] = p.value.data()[i];  // should be 2x
        }
        return l;
    };
    const auto report = check_gradients(wrong, views_of({&p}), 1e-5, 1e-4);
    CHECK_FALSE(report.passed);
    CHECK(report.worst_parameter == "weights");

    CHECK_THROWS_AS(check_gradients(wrong, views_of({&p}), 0.0, 1e-4), ConfigError);
    auto nan_loss = [&]() { return std::nan(""); };
    CHECK_THROWS_AS(check_gradients(nan_loss, views_of({&p}), 1e-5, 1e-4), NumericError);
}

TEST_CASE("rng streams are reproducible") {
    Rng a(99), b(99);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c = Rng::derive(1, 2), d = Rng::derive(1, 3);
    CHECK(c.next_u64() != d.next_u64());
    Rng e(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(e.uniform_index(7) < 7);
    }
}
