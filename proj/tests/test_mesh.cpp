#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pqs/domain.hpp"

using namespace pqs;

TEST_CASE("uniform interval mesh hits the quoted nodes") {
    MeshPtr m = build_mesh(Domain::interval(1.0), 4, 1.0);
    const std::vector<double> expect{0.0, 0.25, 0.5, 0.75, 1.0};
    REQUIRE(m->num_nodes() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(m->nodes()[i] == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("graded interval mesh follows the (2i/n)^grading pattern") {
    MeshPtr m = build_mesh(Domain::interval(1.0), 4, 2.0);
    const std::vector<double> expect{0.0, 0.125, 0.5, 0.875, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(m->nodes()[i] == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("uniform radial mesh") {
    MeshPtr m = build_mesh(Domain::ball(1.0, 2), 2, 1.0);
    CHECK(m->nodes()[0] == 0.0);
    CHECK(m->nodes()[1] == doctest::Approx(0.5));
    CHECK(m->nodes()[2] == 1.0);
}

TEST_CASE("mesh construction rejects bad input") {
    CHECK_THROWS_AS(build_mesh(Domain::interval(1.0), 5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(Domain::interval(1.0), 4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Domain::interval(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Domain::ball(1.0, 0), std::invalid_argument);
}

TEST_CASE("boundary distance") {
    const Domain iv = Domain::interval(1.0);
    CHECK(iv.distance(0.3) == doctest::Approx(0.3));
    CHECK(iv.distance(0.8) == doctest::Approx(0.2));
    CHECK(Domain::ball(2.0, 3).distance(0.5) == doctest::Approx(1.5));
    CHECK_THROWS_AS(iv.distance(1.5), std::invalid_argument);
    CHECK_THROWS_AS(iv.distance(-0.1), std::invalid_argument);
}

TEST_CASE("distance is 1-Lipschitz along node coordinates") {
    for (double grading : {1.0, 3.0}) {
        MeshPtr m = build_mesh(Domain::interval(2.0), 32, grading);
        const auto& x = m->nodes();
        const auto& d = m->distance_node();
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            CHECK(std::fabs(d[i + 1] - d[i]) <= (x[i + 1] - x[i]) * (1.0 + 1e-14));
    }
}

TEST_CASE("quadrature weights") {
    MeshPtr m = build_mesh(Domain::interval(1.0), 4, 1.0);
    CHECK(m->quadrature_weight(1) == doctest::Approx(0.25));  // element [0.25, 0.5]

    MeshPtr r1 = build_mesh(Domain::ball(1.0, 1), 2, 1.0);
    CHECK(r1->quadrature_weight(0) == doctest::Approx(0.5));  // plain length for N=1

    MeshPtr r2 = build_mesh(Domain::ball(1.0, 2), 1, 1.0);
    CHECK(r2->quadrature_weight(0) == doctest::Approx(0.5));  // int_0^1 r dr

    CHECK_THROWS_AS(m->quadrature_weight(4), std::out_of_range);
}

TEST_CASE("element lengths sum to the extent and stay positive") {
    for (double grading : {1.0, 2.5, 4.0}) {
        MeshPtr m = build_mesh(Domain::interval(3.0), 64, grading);
        double sum = 0.0;
        for (double len : m->element_length()) {
            CHECK(len > 0.0);
            sum += len;
        }
        CHECK(sum == doctest::Approx(3.0).epsilon(1e-13));
    }
}

TEST_CASE("interval mesh is symmetric about the midpoint") {
    MeshPtr m = build_mesh(Domain::interval(1.0), 16, 3.0);
    const auto& x = m->nodes();
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(x[i] == doctest::Approx(1.0 - x[x.size() - 1 - i]).epsilon(1e-15));
}

TEST_CASE("doubling a uniform mesh nests the coarse nodes exactly") {
    MeshPtr coarse = build_mesh(Domain::interval(1.0), 8, 1.0);
    MeshPtr fine = build_mesh(Domain::interval(1.0), 16, 1.0);
    for (std::size_t i = 0; i < coarse->num_nodes(); ++i)
        CHECK(coarse->nodes()[i] == fine->nodes()[2 * i]);  // bitwise

    MeshPtr rc = build_mesh(Domain::ball(1.0, 2), 8, 1.0);
    MeshPtr rf = build_mesh(Domain::ball(1.0, 2), 16, 1.0);
    for (std::size_t i = 0; i < rc->num_nodes(); ++i)
        CHECK(rc->nodes()[i] == rf->nodes()[2 * i]);
}

TEST_CASE("smallest element shrinks like (1/n)^grading") {
    for (double grading : {1.0, 2.0, 3.0}) {
        MeshPtr m1 = build_mesh(Domain::interval(1.0), 64, grading);
        MeshPtr m2 = build_mesh(Domain::interval(1.0), 128, grading);
        const double h1 = m1->element_length().front();
        const double h2 = m2->element_length().front();
        const double ratio = h1 / h2;
        CHECK(ratio > std::pow(2.0, grading) * 0.9);
        CHECK(ratio < std::pow(2.0, grading) * 1.1);
    }
}

TEST_CASE("mesh csv has one row per node") {
    MeshPtr m = build_mesh(Domain::interval(1.0), 4, 1.0);
    std::ostringstream ss;
    m->write_csv(ss);
    std::istringstream in(ss.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,x,d");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
}
