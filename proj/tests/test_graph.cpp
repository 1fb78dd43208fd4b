#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"

using namespace schurcut;
using schurcut::testing::random_subset;
using schurcut::testing::random_suite;

namespace {

Graph triangle() { return build_graph({{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Parse;
}

}  // namespace

TEST(BuildGraph, UnitTriangle) {
  const auto g = triangle();
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
  for (Vertex v = 0; v < 3; ++v) EXPECT_DOUBLE_EQ(g.degree(v), 2.0);
  EXPECT_DOUBLE_EQ(g.total_volume(), 6.0);
  EXPECT_TRUE(g.is_connected());
}

TEST(BuildGraph, MergesParallelEdges) {
  const auto g = build_graph({{0, 1, 2}, {0, 1, 3}});
  ASSERT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.edges()[0].u, 0u);
  EXPECT_EQ(g.edges()[0].v, 1u);
  EXPECT_DOUBLE_EQ(g.edges()[0].w, 5.0);
}

TEST(BuildGraph, MergesReversedParallelEdges) {
  const auto g = build_graph({{0, 1, 2}, {1, 0, 3}});
  ASSERT_EQ(g.num_edges(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(1, 0), 5.0);
}

TEST(BuildGraph, RejectsSelfLoop) {
  EXPECT_EQ(kind_of([] { build_graph({{0, 0, 1}}); }), ErrorKind::SelfLoop);
}

TEST(BuildGraph, RejectsNonPositiveWeight) {
  EXPECT_EQ(kind_of([] { build_graph({{0, 1, 0}}); }), ErrorKind::NonPositiveWeight);
  EXPECT_EQ(kind_of([] { build_graph({{0, 1, -2}}); }), ErrorKind::NonPositiveWeight);
}

TEST(BuildGraph, CompactsIdsAndKeepsLabels) {
  const auto g = build_graph({{10, 42, 1}, {42, 7, 2}});
  ASSERT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.label(0), "7");
  EXPECT_EQ(g.label(1), "10");
  EXPECT_EQ(g.label(2), "42");
  EXPECT_DOUBLE_EQ(g.weight(0, 2), 2.0);
}

TEST(BuildGraph, DetectsDisconnection) {
  const auto g = build_graph({{0, 1, 1}, {2, 3, 1}});
  EXPECT_FALSE(g.is_connected());
  EXPECT_EQ(kind_of([&] { require_connected(g); }), ErrorKind::Disconnected);
}

TEST(VertexSetTest, SortsAndDeduplicates) {
  const VertexSet s({3, 1, 3, 0}, 5);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], 0u);
  EXPECT_EQ(s[1], 1u);
  EXPECT_EQ(s[2], 3u);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.complement(), VertexSet({2, 4}, 5));
}

TEST(VertexSetTest, RejectsOutOfRange) {
  EXPECT_EQ(kind_of([] { VertexSet({0, 5}, 5); }), ErrorKind::InvalidVertex);
}

TEST(CutPairTest, Invariants) {
  EXPECT_EQ(kind_of([] { CutPair(VertexSet({0, 1}, 3), VertexSet({1}, 3)); }), ErrorKind::OverlappingSets);
  EXPECT_EQ(kind_of([] { CutPair(VertexSet({}, 3), VertexSet({1}, 3)); }), ErrorKind::EmptySet);
}

TEST(Volume, Examples) {
  const auto g = triangle();
  EXPECT_DOUBLE_EQ(volume(g, VertexSet({0}, 3)), 2.0);
  EXPECT_DOUBLE_EQ(volume(g, VertexSet::all(3)), 6.0);
  EXPECT_DOUBLE_EQ(volume(gen::path(3), VertexSet({1}, 3)), 2.0);
}

TEST(CutWeight, Examples) {
  const auto g = triangle();
  EXPECT_DOUBLE_EQ(cut_weight(g, VertexSet({0}, 3), VertexSet({1}, 3)), 1.0);
  EXPECT_DOUBLE_EQ(cut_weight(g, VertexSet({0}, 3), VertexSet({1, 2}, 3)), 2.0);
  EXPECT_DOUBLE_EQ(cut_weight(gen::path(3), VertexSet({0}, 3), VertexSet({2}, 3)), 0.0);
}

TEST(CutWeight, RejectsOverlap) {
  const auto g = triangle();
  EXPECT_EQ(kind_of([&] { cut_weight(g, VertexSet({0, 1}, 3), VertexSet({1}, 3)); }), ErrorKind::OverlappingSets);
}

TEST(PhiSet, Examples) {
  EXPECT_DOUBLE_EQ(phi_set(triangle(), VertexSet({0}, 3)), 1.0);
  EXPECT_DOUBLE_EQ(phi_set(gen::cycle(4), VertexSet({0, 1}, 4)), 0.5);
  for (std::size_t n : {8u, 20u, 100u}) {
    std::vector<Vertex> arc(n / 2);
    std::iota(arc.begin(), arc.end(), Vertex{0});
    EXPECT_NEAR(phi_set(gen::cycle(n), VertexSet(arc, n)), 2.0 / static_cast<double>(n), 1e-15);
  }
}

TEST(PhiSet, RejectsEmptyOrFull) {
  const auto g = triangle();
  EXPECT_EQ(kind_of([&] { phi_set(g, VertexSet({}, 3)); }), ErrorKind::EmptyOrFullSet);
  EXPECT_EQ(kind_of([&] { phi_set(g, VertexSet::all(3)); }), ErrorKind::EmptyOrFullSet);
}

TEST(GraphProperties, DegreeInvariants) {
  for (const auto& g : random_suite(30, 3, 12)) {
    const auto rebuilt = g.rebuild_degrees();
    double edge_total = 0.0;
    for (const auto& e : g.edges()) {
      EXPECT_GT(e.w, 0.0);
      EXPECT_LT(e.u, e.v);
      edge_total += e.w;
    }
    for (Vertex v = 0; v < g.num_vertices(); ++v) EXPECT_EQ(g.degree(v), rebuilt[v]);
    EXPECT_NEAR(g.total_volume(), 2.0 * edge_total, 1e-12 * edge_total);
  }
}

TEST(GraphProperties, CutVolumeIdentities) {
  std::mt19937_64 rng(7);
  for (const auto& g : random_suite(30, 3, 12)) {
    const std::size_t n = g.num_vertices();
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = random_subset(n, 0.5, rng);
      if (a.empty() || a.size() == n) continue;
      const auto rest = a.complement();
      const double boundary = cut_weight(g, a, rest);
      EXPECT_DOUBLE_EQ(boundary, cut_weight(g, rest, a));
      EXPECT_NEAR(boundary, volume(g, a) - 2.0 * internal_weight(g, a), 1e-12 * g.total_volume());
      EXPECT_NEAR(boundary, boundary_weight(g, a), 1e-12 * g.total_volume());
      const double phi = phi_set(g, a);
      EXPECT_GT(phi, 0.0);
      EXPECT_LE(phi, 1.0 + 1e-12);

      const auto b = random_subset(n, 0.5, rng);
      std::vector<Vertex> b_only;
      for (Vertex v : b) {
        if (!a.contains(v)) b_only.push_back(v);
      }
      const VertexSet bd(b_only, n);
      EXPECT_NEAR(volume(g, a.united(bd)), volume(g, a) + volume(g, bd), 1e-12 * g.total_volume());
    }
  }
}

TEST(EdgeListIo, ParsesCommentsAndStringIds) {
  std::istringstream in("# a comment\nalpha beta 1.5\n\n  # indented comment\nbeta gamma 2\nalpha beta 0.5\n");
  const auto g = read_edge_list(in);
  ASSERT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.label(0), "alpha");
  EXPECT_EQ(g.label(1), "beta");
  EXPECT_EQ(g.label(2), "gamma");
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(g.weight(1, 2), 2.0);
}

TEST(EdgeListIo, NumericIdsAreSortedNumerically) {
  std::istringstream in("10 2 1\n2 9 1\n");
  const auto g = read_edge_list(in);
  EXPECT_EQ(g.label(0), "2");
  EXPECT_EQ(g.label(1), "9");
  EXPECT_EQ(g.label(2), "10");
}

TEST(EdgeListIo, ReportsLineOfParseError) {
  std::istringstream in("0 1 1\n1 2 abc\n");
  try {
    read_edge_list(in);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream missing("0 1\n");
  EXPECT_EQ(kind_of([&] { read_edge_list(missing); }), ErrorKind::Parse);
  std::istringstream loop("3 3 1\n");
  EXPECT_EQ(kind_of([&] { read_edge_list(loop); }), ErrorKind::SelfLoop);
}

TEST(EdgeListIo, RoundTripsWeightsExactly) {
  const auto g = gen::random_connected(9, 0.6, 4, 3);
  std::vector<Edge> scaled;
  for (const auto& e : g.edges()) scaled.push_back({e.u, e.v, e.w / 3.0});
  const auto h = Graph::from_edges(g.num_vertices(), scaled);
  std::stringstream io;
  write_edge_list(io, h);
  const auto back = read_edge_list(io);
  ASSERT_EQ(back.num_edges(), h.num_edges());
  for (std::size_t i = 0; i < h.num_edges(); ++i) EXPECT_EQ(back.edges()[i].w, h.edges()[i].w);
}

TEST(Generators, CycleKeepsGenerationOrder) {
  const auto c = gen::cycle_edges(4);
  ASSERT_EQ(c.edges.size(), 4u);
  for (Vertex i = 0; i < 4; ++i) {
    EXPECT_EQ(c.edges[i].u, i);
    EXPECT_EQ(c.edges[i].v, (i + 1) % 4);
    EXPECT_EQ(c.edges[i].w, 1.0);
  }
}

TEST(Generators, Families) {
  const auto p = gen::path_edges(3);
  ASSERT_EQ(p.edges.size(), 2u);
  EXPECT_EQ(p.edges[1].u, 1u);
  EXPECT_EQ(p.edges[1].v, 2u);
  const auto d = gen::dumbbell(3);
  EXPECT_EQ(d.num_vertices(), 6u);
  EXPECT_EQ(d.num_edges(), 7u);
  EXPECT_TRUE(d.is_connected());
  const auto grid = gen::grid(3, 4);
  EXPECT_EQ(grid.num_edges(), 3u * 3u + 2u * 4u);
  EXPECT_EQ(kind_of([] { gen::cycle(2); }), ErrorKind::BadParams);
  EXPECT_EQ(kind_of([] { gen::random_connected(5, 0.0, 3, 1); }), ErrorKind::BadParams);
}

TEST(Generators, RandomIsDeterministicAndConnected) {
  const auto a = gen::random_connected_edges(12, 0.3, 5, 99);
  const auto b = gen::random_connected_edges(12, 0.3, 5, 99);
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    EXPECT_EQ(a.edges[i].u, b.edges[i].u);
    EXPECT_EQ(a.edges[i].v, b.edges[i].v);
    EXPECT_EQ(a.edges[i].w, b.edges[i].w);
  }
  EXPECT_TRUE(a.graph().is_connected());
}

TEST(Concurrency, GraphReadsAreThreadSafe) {
  const auto g = gen::grid(20, 20);
  std::vector<double> totals(4, 0.0);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < totals.size(); ++t) {
    pool.emplace_back([&, t] {
      for (int rep = 0; rep < 50; ++rep) totals[t] = volume(g, VertexSet::all(g.num_vertices()));
    });
  }
  for (auto& th : pool) th.join();
  for (double v : totals) EXPECT_DOUBLE_EQ(v, g.total_volume());
}
