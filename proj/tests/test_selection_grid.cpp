#include <doctest.h>

#include <chrono>
#include <vector>

#include "fierisk/estimation.hpp"
#include "fierisk/fiegarch.hpp"

using namespace fierisk;

TEST_CASE("full ARMA x FIEGARCH grid completes on a 1729-point series") {
  const auto m1 = *reference_model("M1");
  SimulationOptions o;
  o.n = 1729;
  const auto path = simulate(m1, o, SeedRecord{1729, 0});
  std::vector<ModelOrders> grid;
  for (std::size_t p1 = 0; p1 <= 3; ++p1)
    for (std::size_t q1 = 0; q1 <= 3; ++q1)
      for (std::size_t p2 = 0; p2 <= 1; ++p2)
        for (std::size_t q2 = 0; q2 <= 1; ++q2) grid.push_back(ModelOrders{p1, q1, p2, q2, true, true});
  REQUIRE(grid.size() == 64);

  const auto t0 = std::chrono::steady_clock::now();
  const auto sel = model_select(grid, path.x);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("grid runtime " << secs << " s, failures " << sel.failures.size());
  CHECK(sel.ranked.size() + sel.failures.size() == 64);
  CHECK(sel.ranked.size() >= 60);
  CHECK(secs < 600.0);
  for (std::size_t i = 1; i < sel.ranked.size(); ++i) CHECK(sel.ranked[i - 1].bic <= sel.ranked[i].bic);
}
