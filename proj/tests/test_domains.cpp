#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"
#include "test_util.hpp"

using lazycg::Domain;
using lazycg::Edge;
using lazycg::InputError;
using lazycg::Rng;
using lazycg::Vector;
using lazycg::Vertex;
using lazycg_test::random_direction;

namespace {

Vertex make_vertex(std::initializer_list<double> coords) {
  Vertex v;
  v.coords = coords;
  return v;
}

Domain triangle_list() {
  return Domain::vertex_list({make_vertex({0, 0}), make_vertex({1, 0}), make_vertex({0, 1})});
}

}  // namespace

TEST_CASE("simplex linear minimization picks the smallest coefficient") {
  const Domain d = Domain::simplex(3);
  CHECK(d.lmo({3, 1, 2}).coords == Vector{0, 1, 0});
  // ties break to the lowest index
  CHECK(d.lmo({1, 1, 2}).coords == Vector{1, 0, 0});
  CHECK(d.lmo({0, 0, 0}).coords == Vector{1, 0, 0});
}

TEST_CASE("hypercube linear minimization uses the sign rule") {
  const Domain d = Domain::hypercube(2);
  CHECK(d.lmo({-1, 2}).coords == Vector{1, 0});
  CHECK(d.lmo({0, 0}).coords == Vector{0, 0});
}

TEST_CASE("vertex list linear minimization is the exhaustive minimum") {
  const Domain d = triangle_list();
  CHECK(d.lmo({1, 1}).coords == Vector{0, 0});
  CHECK(d.lmo({-1, 0}).coords == Vector{1, 0});
}

TEST_CASE("linear minimization validates its input") {
  const Domain d = Domain::simplex(3);
  CHECK_THROWS_AS(d.lmo({1, 2}), InputError);
  CHECK_THROWS_AS(d.lmo({1, 2, std::numeric_limits<double>::quiet_NaN()}), InputError);
  CHECK_THROWS_AS(Domain::simplex(0), InputError);
  CHECK_THROWS_AS(Domain::hypercube(-1), InputError);
  CHECK_THROWS_AS(Domain::vertex_list({}), InputError);
  CHECK_THROWS_AS(Domain::vertex_list({make_vertex({1, 0}), make_vertex({1})}), InputError);
}

TEST_CASE("support-restricted oracle maximizes inside the mask") {
  const Domain simplex = Domain::simplex(3);
  const auto v = simplex.lmo_restricted({1, 5, 2}, {1, 0, 1});
  REQUIRE(v.has_value());
  CHECK(v->coords == Vector{0, 0, 1});

  const Domain list =
      Domain::vertex_list({make_vertex({1, 1}), make_vertex({1, 0}), make_vertex({0, 1})});
  const auto w = list.lmo_restricted({1, 1}, {1, 0});
  REQUIRE(w.has_value());
  CHECK(w->coords == Vector{1, 0});

  const Domain cube = Domain::hypercube(2);
  const auto z = cube.lmo_restricted({1, 1}, {0, 0});
  REQUIRE(z.has_value());
  CHECK(z->coords == Vector{0, 0});

  // the simplex has no vertex supported inside an empty mask
  CHECK_FALSE(simplex.lmo_restricted({1, 1, 1}, {0, 0, 0}).has_value());
}

TEST_CASE("augmentation moves to a strictly cheaper vertex or stays") {
  const Domain cube = Domain::hypercube(2);
  const Vertex top = make_vertex({1, 1});
  CHECK(cube.augment({1, 1}, top).coords == Vector{0, 1});  // tie flips the lowest index
  CHECK(cube.augment({-1, -1}, top).coords == Vector{1, 1});

  const Domain pair = Domain::vertex_list({make_vertex({0, 0}), make_vertex({1, 0})});
  CHECK(pair.augment({-1, 0}, make_vertex({0, 0})).coords == Vector{1, 0});

  const Domain simplex = Domain::simplex(2);
  CHECK_NOTHROW(simplex.augment({1, 0}, simplex.canonical_vertex()));
}

TEST_CASE("augmentation stalls exactly at linear minimizers") {
  // exhaustive over all vertices of several small 0/1 domains
  const Domain domains[] = {Domain::hypercube(3),
                            Domain::spanning_tree(3, {{0, 1}, {1, 2}, {0, 2}}),
                            triangle_list()};
  Rng rng(1234);
  for (const Domain& d : domains) {
    const auto vertices = d.enumerate_vertices();
    for (int trial = 0; trial < 200; ++trial) {
      const Vector c = random_direction(rng, d.dimension());
      const double optimum = lazycg::dot(c, d.lmo(c).coords);
      for (const Vertex& x : vertices) {
        const Vertex next = d.augment(c, x);
        const double cx = lazycg::dot(c, x.coords);
        if (lazycg::same_vertex(next, x)) {
          CHECK(cx <= optimum + 1e-12);
        } else {
          CHECK(lazycg::dot(c, next.coords) < cx);
        }
      }
    }
  }
}

TEST_CASE("vertex enumeration is complete and duplicate free") {
  CHECK(Domain::simplex(2).enumerate_vertices().size() == 2);
  CHECK(Domain::hypercube(2).enumerate_vertices().size() == 4);

  // the triangle graph has one spanning tree per omitted edge
  const Domain k3 = Domain::spanning_tree(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto trees = k3.enumerate_vertices();
  CHECK(trees.size() == 3);

  // complete graph on four nodes: 4^2 = 16 spanning trees
  std::vector<Edge> k4_edges;
  for (int u = 0; u < 4; ++u) {
    for (int v = u + 1; v < 4; ++v) k4_edges.push_back({u, v});
  }
  const Domain k4 = Domain::spanning_tree(4, k4_edges);
  const auto k4_trees = k4.enumerate_vertices();
  CHECK(k4_trees.size() == 16);

  std::set<Vector> unique;
  for (const Vertex& v : k4_trees) {
    CHECK(v.is_integral);
    CHECK(std::count(v.coords.begin(), v.coords.end(), 1.0) == 3);
    unique.insert(v.coords);
  }
  CHECK(unique.size() == k4_trees.size());
}

TEST_CASE("shortest path domain enumerates source-sink paths") {
  // diamond DAG: 0 -> 1 -> 3, 0 -> 2 -> 3, plus shortcut 0 -> 3
  const std::vector<Edge> arcs = {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3}};
  const Domain d = Domain::shortest_path(4, arcs, 0, 3);
  CHECK(d.dimension() == 5);
  CHECK(d.enumerate_vertices().size() == 3);

  // the cheapest path under these arc costs is the shortcut
  const Vertex best = d.lmo({1, 1, 1, 1, 1});
  CHECK(best.coords == Vector{0, 0, 0, 0, 1});

  // negative costs reward the long way around
  const Vertex longest = d.lmo({-1, -1, -1, -1, -1});
  CHECK(lazycg::dot(Vector{1, 1, 1, 1, 1}, longest.coords) == 2.0);
}

TEST_CASE("shortest path construction rejects bad graphs") {
  CHECK_THROWS_AS(Domain::shortest_path(2, {{0, 1}, {1, 0}}, 0, 1), InputError);  // cycle
  CHECK_THROWS_AS(Domain::shortest_path(3, {{0, 1}}, 0, 2), InputError);          // no path
  CHECK_THROWS_AS(Domain::spanning_tree(3, {{0, 1}}), InputError);  // disconnected
}

TEST_CASE("linear minimization is invariant under positive scaling") {
  Rng rng(77);
  const Domain domains[] = {Domain::simplex(5), Domain::hypercube(4),
                            Domain::spanning_tree(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}})};
  for (const Domain& d : domains) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vector c = random_direction(rng, d.dimension());
      const double alpha = rng.uniform(0.1, 10.0);
      Vector scaled = c;
      for (double& v : scaled) v *= alpha;
      CHECK(d.lmo(c).coords == d.lmo(scaled).coords);
    }
  }
}

TEST_CASE("linear minimization matches exhaustive search on enumerable domains") {
  Rng rng(99);
  const Domain domains[] = {
      Domain::simplex(4), Domain::hypercube(4),
      Domain::spanning_tree(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}, {1, 3}}),
      Domain::shortest_path(5, {{0, 1}, {1, 4}, {0, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}}, 0, 4),
      triangle_list()};
  for (const Domain& d : domains) {
    const auto vertices = d.enumerate_vertices();
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector c = random_direction(rng, d.dimension());
      const double got = lazycg::dot(c, d.lmo(c).coords);
      double best = std::numeric_limits<double>::infinity();
      for (const Vertex& v : vertices) best = std::min(best, lazycg::dot(c, v.coords));
      CHECK(got == Catch::Approx(best).margin(1e-12));
    }
  }
}

TEST_CASE("support-restricted oracle matches exhaustive restricted search") {
  Rng rng(4242);
  const Domain domains[] = {
      Domain::simplex(4), Domain::hypercube(4),
      Domain::spanning_tree(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}),
      Domain::shortest_path(5, {{0, 1}, {1, 4}, {0, 2}, {2, 3}, {3, 4}, {0, 4}}, 0, 4)};
  for (const Domain& d : domains) {
    const auto vertices = d.enumerate_vertices();
    for (int trial = 0; trial < 300; ++trial) {
      const Vector c = random_direction(rng, d.dimension());
      std::vector<char> mask(d.dimension());
      for (char& m : mask) m = rng.bernoulli(0.6) ? 1 : 0;
      const auto got = d.lmo_restricted(c, mask);
      double best = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (const Vertex& v : vertices) {
        if (!lazycg::support_contained_in(v.coords, mask)) continue;
        any = true;
        best = std::max(best, lazycg::dot(c, v.coords));
      }
      REQUIRE(got.has_value() == any);
      if (any) {
        CHECK(lazycg::dot(c, got->coords) == Catch::Approx(best).margin(1e-12));
        CHECK(lazycg::support_contained_in(got->coords, mask));
      }
    }
  }
}

TEST_CASE("diameter metadata dominates true vertex distances") {
  const Domain domains[] = {
      Domain::simplex(4), Domain::hypercube(3),
      Domain::spanning_tree(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}),
      Domain::shortest_path(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}, {0, 3}}, 0, 3), triangle_list()};
  for (const Domain& d : domains) {
    const auto vertices = d.enumerate_vertices();
    double l2 = 0.0;
    double l1 = 0.0;
    for (const Vertex& a : vertices) {
      for (const Vertex& b : vertices) {
        double s2 = 0.0;
        double s1 = 0.0;
        for (std::size_t i = 0; i < a.coords.size(); ++i) {
          const double diff = a.coords[i] - b.coords[i];
          s2 += diff * diff;
          s1 += std::fabs(diff);
        }
        l2 = std::max(l2, std::sqrt(s2));
        l1 = std::max(l1, s1);
      }
    }
    CHECK(d.l2_diameter() >= l2 - 1e-12);
    CHECK(d.l1_diameter() >= l1 - 1e-12);
  }
}

TEST_CASE("locality parameter handling") {
  Domain simplex = Domain::simplex(3);
  CHECK(simplex.has_mu());
  CHECK(simplex.mu() == 1.0);

  Domain cube = Domain::hypercube(2);
  CHECK_FALSE(cube.has_mu());
  CHECK_THROWS_AS(cube.mu(), InputError);
  cube.set_mu(2.0);
  CHECK(cube.mu() == 2.0);
  CHECK_THROWS_AS(cube.set_mu(0.5), InputError);  // mu >= 1 required
}

TEST_CASE("canonical vertex is the zero-objective minimizer") {
  const Domain d = Domain::simplex(3);
  CHECK(d.canonical_vertex().coords == d.lmo({0, 0, 0}).coords);
  const Domain cube = Domain::hypercube(3);
  CHECK(cube.canonical_vertex().coords == Vector{0, 0, 0});
}
