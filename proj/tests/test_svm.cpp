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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stressnet/errors.hpp"
#include "stressnet/random.hpp"
#include "stressnet/svm.hpp"

using namespace stressnet;

namespace {

struct Fixture {
    std::vector<Vector> x;
    std::vector<int> y;
};

Fixture four_points() {
    return {{Vector{0, 0}, Vector{0, 1}, Vector{4, 4}, Vector{4, 5}}, {-1, -1, 1, 1}};
}

// Two blobs of n points each around (-2,-2) and (2,2).
Fixture blobs(std::size_t n, std::uint64_t seed, double spread = 0.8) {
    Rng rng(seed);
    Fixture f;
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const double centre = i < n ? -2.0 : 2.0;
        f.x.push_back(Vector{centre + rng.uniform(-spread, spread), centre + rng.uniform(-spread, spread)});
        f.y.push_back(i < n ? -1 : 1);
    }
    return f;
}

std::size_t margin_violations(const SvmModel& model, const Fixture& f, double slack) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < f.x.size(); ++i) n += f.y[i] * model.decision(f.x[i]) < 1.0 - slack;
    return n;
}

void check_dual(const SvmTrainResult& result, const Fixture& f, double c) {
    double balance = 0.0;
    for (std::size_t i = 0; i < result.alphas.size(); ++i) {
        CHECK(result.alphas[i] >= 0.0);
        CHECK(result.alphas[i] <= c);
        balance += result.alphas[i] * f.y[i];
    }
    CHECK(std::abs(balance) < 1e-6);
}

}  // namespace

TEST_CASE("sentence vectors") {
    EmbeddingTable table(3);
    table.add("a", Vector{1, 2, 3});
    table.add("b", Vector{-1, -2, -3});
    table.add("c", Vector{4, 0, -2});
    CHECK(sentence_vector({"a"}, table) == Vector{1, 2, 3});
    CHECK(sentence_vector({"a", "b"}, table) == Vector{0, 0, 0});
    const Vector mean = sentence_vector({"a", "c", "zzz", "a"}, table);
    CHECK(mean[0] == doctest::Approx(2.0));
    CHECK(mean[1] == doctest::Approx(4.0 / 3.0));
    CHECK(mean[2] == doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(sentence_vector({"zzz"}, table), CoverageError);
    CHECK_THROWS_AS(table.add("d", Vector{1, 2}), ShapeError);
}

TEST_CASE("embedding table parsing") {
    std::istringstream in("hello 0.5 -1 2\nworld 1 1 1\n");
    const auto table = EmbeddingTable::parse(in);
    CHECK(table.dim() == 3);
    CHECK(table.size() == 2);
    CHECK(*table.find("hello") == Vector{0.5, -1, 2});
    std::istringstream wrong("a 1 2\n");
    CHECK_THROWS_AS(EmbeddingTable::parse(wrong, kWordVectorDim), ParseError);
    std::istringstream ragged("a 1 2\nb 1\n");
    CHECK_THROWS_AS(EmbeddingTable::parse(ragged), ParseError);
    std::istringstream junk("a 1 x\n");
    CHECK_THROWS_AS(EmbeddingTable::parse(junk), ParseError);
}

TEST_CASE("rbf kernel") {
    CHECK(rbf_kernel(Vector{0}, Vector{1}, 0.5) == doctest::Approx(0.6065306597126334).epsilon(1e-15));
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        Vector a(5), b(5);
        for (std::size_t i = 0; i < 5; ++i) {
            a[i] = rng.uniform(-3, 3);
            b[i] = rng.uniform(-3, 3);
        }
        const double g = rng.uniform(0.01, 2.0);
        CHECK(rbf_kernel(a, a, g) == 1.0);
        CHECK(rbf_kernel(a, b, g) == rbf_kernel(b, a, g));
    }
    CHECK_THROWS_AS(rbf_kernel(Vector{0}, Vector{1}, 0.0), ConfigError);
    CHECK_THROWS_AS(rbf_kernel(Vector{0}, Vector{1, 2}, 1.0), ShapeError);
}

TEST_CASE("gram matrix is positive semidefinite") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(7);
        std::vector<Vector> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(Vector{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
        const double g = rng.uniform(0.05, 3.0);
        Eigen::MatrixXd gram(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) gram(i, j) = rbf_kernel(pts[i], pts[j], g);
        }
        CHECK((gram - gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("four separable points") {
    const auto f = four_points();
    SvmParams p;
    p.gamma = 0.5;
    const auto result = svm_train(f.x, f.y, p);
    for (std::size_t i = 0; i < 4; ++i) CHECK(svm_predict(result.model, f.x[i]) == (f.y[i] > 0 ? 1 : 0));
    check_dual(result, f, p.c);
}

TEST_CASE("non-support training points keep their label") {
    const auto f = blobs(20, 3);
    SvmParams p;
    p.gamma = 0.5;
    const auto result = svm_train(f.x, f.y, p);
    std::size_t interior = 0;
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        if (result.alphas[i] == 0.0) {
            ++interior;
            CHECK(svm_predict(result.model, f.x[i]) == (f.y[i] > 0 ? 1 : 0));
        }
    }
    CHECK(interior > 0);
    CHECK(result.model.support_vectors.size() + interior == f.x.size());
    check_dual(result, f, p.c);
}

TEST_CASE("contradictory duplicate point") {
    auto f = four_points();
    f.x.push_back(Vector{2, 2});
    f.y.push_back(1);
    f.x.push_back(Vector{2, 2});
    f.y.push_back(-1);
    SvmParams p;
    p.gamma = 0.5;
    const auto result = svm_train(f.x, f.y, p);
    const double d = result.model.decision(Vector{2, 2});
    CHECK(std::min(d, -d) < 1.0);
    CHECK((1.0 * d < 1.0 || -1.0 * d < 1.0));
    check_dual(result, f, p.c);
}

TEST_CASE("dual feasibility on random problems") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = blobs(5 + rng.uniform_index(10), rng.next_u64(), 2.5);
        SvmParams p;
        p.c = rng.uniform(0.1, 5.0);
        p.gamma = rng.uniform(0.1, 2.0);
        check_dual(svm_train(f.x, f.y, p), f, p.c);
    }
}

TEST_CASE("decision values do not depend on example order") {
    const auto f = blobs(15, 5, 2.0);
    SvmParams p;
    p.gamma = 0.7;
    const auto base = svm_train(f.x, f.y, p);
    Rng rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::size_t> order(f.x.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        Fixture g;
        for (auto i : order) {
            g.x.push_back(f.x[i]);
            g.y.push_back(f.y[i]);
        }
        const auto other = svm_train(g.x, g.y, p);
        for (const auto& x : f.x) CHECK(other.model.decision(x) == doctest::Approx(base.model.decision(x)).epsilon(1e-12));
    }
}

TEST_CASE("larger C never adds margin violations on separable data") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = blobs(20, seed, 1.5);
        SvmParams p;
        p.gamma = 0.5;
        std::size_t previous = f.x.size() + 1;
        for (double c : {0.01, 0.1, 1.0, 10.0, 100.0}) {
            p.c = c;
            const auto violations = margin_violations(svm_train(f.x, f.y, p).model, f, p.tol);
            CHECK_MESSAGE(violations <= previous, "seed ", seed, " C ", c);
            previous = violations;
        }
        CHECK(previous == 0);
    }
}

TEST_CASE("solver reaches the KKT tolerance") {
    const auto f = blobs(25, 8, 2.5);
    SvmParams p;
    p.gamma = 0.5;
    p.c = 2.0;
    const auto result = svm_train(f.x, f.y, p);
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        const double m = f.y[i] * result.model.decision(f.x[i]);
        if (result.alphas[i] == 0.0) CHECK(m >= 1.0 - p.tol);
        if (result.alphas[i] == p.c) CHECK(m <= 1.0 + p.tol);
        if (result.alphas[i] > 0.0 && result.alphas[i] < p.c) CHECK(std::abs(m - 1.0) <= p.tol);
    }
}

TEST_CASE("prediction tie rule and errors") {
    SvmModel empty;
    CHECK(svm_predict(empty, Vector{1, 2}) == 0);
    const auto f = four_points();
    SvmParams p;
    p.gamma = 0.5;
    const auto result = svm_train(f.x, f.y, p);
    CHECK_THROWS_AS(svm_predict(result.model, Vector{1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(svm_train({Vector{0}, Vector{1}}, {1, 1}, p), DataError);
    CHECK(to_signed_label(1) == 1);
    CHECK(to_signed_label(0) == -1);
}

TEST_CASE("default gamma") {
    const std::vector<Vector> v{Vector{0, 2}, Vector{2, 0}};
    CHECK(default_gamma(v) == doctest::Approx(0.5));
}
