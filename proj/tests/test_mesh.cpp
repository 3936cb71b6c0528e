#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "mhdens/mesh.hpp"

using namespace mhdens;

TEST_CASE("unit square counts and h_max") {
  const Mesh m2 = unit_square(2);
  CHECK(m2.n_cells() == 4);
  CHECK(m2.n_vertices() == 9);

  const Mesh m1 = unit_square(1);
  CHECK(m1.n_cells() == 1);
  CHECK(m1.h_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  const Mesh m32 = unit_square(32);
  CHECK(m32.n_cells() == 1024);  // the finest level of the convergence ladder

  CHECK_THROWS_AS(unit_square(0), std::invalid_argument);
}

TEST_CASE("unit square boundary facets are walls on the geometric boundary") {
  const Mesh m = unit_square(4);
  validate_mesh(m);
  int boundary = 0;
  for (const auto& f : m.facets) {
    if (f.tag == BoundaryTag::interior) continue;
    ++boundary;
    CHECK(f.tag == BoundaryTag::wall);
    for (const auto v : f.vertices) {
      const auto [x, y] = m.vertices[v];
      const bool on_edge = x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0;
      CHECK(on_edge);
    }
  }
  CHECK(boundary == 16);
}

TEST_CASE("step channel cell counts") {
  const Mesh c1 = step_channel(1);
  CHECK(c1.n_cells() == 399);
  validate_mesh(c1);

  const Mesh c2 = step_channel(2);
  CHECK(c2.n_cells() == 1596);
  validate_mesh(c2);

  CHECK_THROWS_AS(step_channel(0), std::invalid_argument);
}

TEST_CASE("step channel inlet facet count scales with resolution") {
  for (const int k : {1, 2, 3}) {
    const Mesh m = step_channel(k);
    int inlet = 0;
    for (const auto& f : m.facets)
      if (f.tag == BoundaryTag::inlet) ++inlet;
    CHECK(inlet == 10 * k);
  }
}

TEST_CASE("step channel tags sit on the right geometry") {
  const Mesh m = step_channel(2);
  bool saw_step = false, saw_outlet = false;
  for (const auto& f : m.facets) {
    const auto [x0, y0] = m.vertices[f.vertices[0]];
    const auto [x1, y1] = m.vertices[f.vertices[1]];
    switch (f.tag) {
      case BoundaryTag::inlet:
        CHECK(x0 == 0.0);
        CHECK(x1 == 0.0);
        break;
      case BoundaryTag::outlet:
        saw_outlet = true;
        CHECK(x0 == 40.0);
        CHECK(x1 == 40.0);
        break;
      case BoundaryTag::step: {
        saw_step = true;
        const bool side = (x0 == 5.0 && x1 == 5.0) || (x0 == 6.0 && x1 == 6.0);
        const bool top = y0 == 1.0 && y1 == 1.0 && x0 >= 5.0 && x1 <= 6.0;
        CHECK((side || top));
        break;
      }
      case BoundaryTag::wall: {
        const bool bottom = y0 == 0.0 && y1 == 0.0;
        const bool top = y0 == 10.0 && y1 == 10.0;
        CHECK((bottom || top));
        if (bottom) {
          // the removed step leaves no bottom wall on [5,6]
          CHECK((std::max(x0, x1) <= 5.0 || std::min(x0, x1) >= 6.0));
        }
        break;
      }
      default:
        break;
    }
  }
  CHECK(saw_step);
  CHECK(saw_outlet);
}

TEST_CASE("boundary tag names") {
  CHECK(std::string(to_string(BoundaryTag::interior)) == "interior");
  CHECK(std::string(to_string(BoundaryTag::wall)) == "wall");
  CHECK(std::string(to_string(BoundaryTag::inlet)) == "inlet");
  CHECK(std::string(to_string(BoundaryTag::outlet)) == "outlet");
  CHECK(std::string(to_string(BoundaryTag::step)) == "step");
}

TEST_CASE("areas sum to the domain area") {
  CHECK(total_area(unit_square(7)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(total_area(step_channel(1)) == doctest::Approx(399.0).epsilon(1e-12));
  CHECK(total_area(step_channel(2)) == doctest::Approx(399.0).epsilon(1e-12));
}

TEST_CASE("refine splits cells in four and halves h_max") {
  const Mesh coarse = unit_square(1);
  const Mesh fine = refine(coarse);
  CHECK(fine.n_cells() == 4);
  CHECK(fine.h_max == doctest::Approx(coarse.h_max / 2.0).epsilon(1e-14));
  CHECK(total_area(fine) == doctest::Approx(1.0).epsilon(1e-12));
  validate_mesh(fine);
}

TEST_CASE("refine inherits boundary tags and preserves the tag set") {
  auto tag_set = [](const Mesh& m) {
    std::set<BoundaryTag> tags;
    for (const auto& f : m.facets)
      if (f.tag != BoundaryTag::interior) tags.insert(f.tag);
    return tags;
  };
  const Mesh channel = step_channel(1);
  const Mesh fine = refine(channel);
  CHECK(fine.n_cells() == 4 * channel.n_cells());
  CHECK(tag_set(fine) == tag_set(channel));
  CHECK(fine.h_max == doctest::Approx(channel.h_max / 2.0).epsilon(1e-14));
  CHECK(total_area(fine) == doctest::Approx(399.0).epsilon(1e-12));

  // A refined channel matches the directly generated finer channel.
  const Mesh direct = step_channel(2);
  CHECK(fine.n_cells() == direct.n_cells());
  CHECK(fine.n_vertices() == direct.n_vertices());
}

TEST_CASE("refining twice keeps scaling") {
  const Mesh m = refine(refine(unit_square(2)));
  CHECK(m.n_cells() == 64);
  CHECK(m.h_max == doctest::Approx(std::sqrt(2.0) / 8.0).epsilon(1e-13));
}
