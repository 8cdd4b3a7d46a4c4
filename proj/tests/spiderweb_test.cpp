#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "atlas/spiderweb.hpp"
#include "doctest.h"

using namespace atlas;

namespace {
const double kPi = std::acos(-1.0);

MarkedField synthetic(int res, double S, const std::vector<char>& certified) {
  MarkedField f;
  f.grid = GridSpec{Complex(0, 0), S, res};
  f.function = FunctionSpec::h();
  f.cells.resize(static_cast<size_t>(res) * res);
  for (size_t k = 0; k < f.cells.size(); ++k) {
    f.cells[k].certified = certified[k] != 0;
    if (certified[k]) {
      f.cells[k].delay = 0;
      f.cells[k].depth = 12;
    }
  }
  return f;
}

// Oracle: can the basepoint's 4-connected uncertified component reach the
// grid edge?
bool oracle_escapes(const MarkedField& f, int bi, int bj) {
  int res = f.grid.resolution;
  std::vector<char> seen(static_cast<size_t>(res) * res, 0);
  std::deque<std::pair<int, int>> q{{bi, bj}};
  seen[static_cast<size_t>(bi) * res + bj] = 1;
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop_front();
    if (i == 0 || j == 0 || i == res - 1 || j == res - 1) return true;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int ni = i + di[d], nj = j + dj[d];
      size_t idx = static_cast<size_t>(ni) * res + nj;
      if (ni < 0 || nj < 0 || ni >= res || nj >= res) continue;
      if (seen[idx] || f.at(ni, nj).certified) continue;
      seen[idx] = 1;
      q.emplace_back(ni, nj);
    }
  }
  return false;
}
}  // namespace

TEST_CASE("winding numbers of simple polylines") {
  std::vector<Complex> sq = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {1, 1}};
  CHECK(winding_number(sq, Complex(0, 0)) == 1);
  CHECK(winding_number(sq, Complex(5, 0)) == 0);
  std::vector<Complex> rev(sq.rbegin(), sq.rend());
  CHECK(winding_number(rev, Complex(0, 0)) == -1);
  CHECK_THROWS_AS(winding_number(sq, Complex(1, 1)), std::invalid_argument);
}

TEST_CASE("minimal enclosure: one uncertified cell yields the 8-cell ring") {
  int res = 16;
  std::vector<char> c(res * res, 1);
  c[8 * res + 8] = 0;
  auto f = synthetic(res, 8.0, c);
  auto cert = find_separating_cycle(f, f.grid.cell_center(8, 8), 0.1);
  REQUIRE(cert);
  CHECK(cert->vertices.size() == 9);  // 8 ring cells, closed
  CHECK(cert->winding == 1);
  CHECK(cert->vertices.front() == cert->vertices.back());
  CHECK(cert->inner_radius == doctest::Approx(1.0));
}

TEST_CASE("corridor to the boundary defeats separation") {
  int res = 16;
  std::vector<char> c(res * res, 1);
  for (int j = 8; j < res; ++j) c[8 * res + j] = 0;
  auto f = synthetic(res, 8.0, c);
  CHECK(!find_separating_cycle(f, f.grid.cell_center(8, 8), 0.1));
}

TEST_CASE("certified basepoint is a caller error") {
  int res = 16;
  std::vector<char> c(res * res, 1);
  auto f = synthetic(res, 8.0, c);
  CHECK_THROWS_AS(find_separating_cycle(f, Complex(0.1, 0.1), 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(find_separating_cycle(f, Complex(100.0, 0.0), 0.1),
                  std::invalid_argument);  // off-grid
}

TEST_CASE("separation agrees with the flood-fill oracle on random fields") {
  std::mt19937 rng(59);
  std::bernoulli_distribution cert_p(0.55);
  int res = 64;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<char> c(static_cast<size_t>(res) * res);
    for (auto& x : c) x = cert_p(rng) ? 1 : 0;
    auto f = synthetic(res, 8.0, c);
    std::uniform_int_distribution<int> pick(0, res - 1);
    int bi, bj;
    do {
      bi = pick(rng);
      bj = pick(rng);
    } while (f.at(bi, bj).certified);
    auto cert = find_separating_cycle(f, f.grid.cell_center(bi, bj), 0.0);
    bool escapes = oracle_escapes(f, bi, bj);
    CHECK(cert.has_value() == !escapes);
    if (cert) {
      CHECK(cert->winding == 1);
      CHECK(cert->vertices.front() == cert->vertices.back());
      double step = f.grid.step();
      for (size_t k = 0; k + 1 < cert->vertices.size(); ++k) {
        Complex d = cert->vertices[k + 1] - cert->vertices[k];
        CHECK(std::abs(d.real()) <= 1.5 * step);
        CHECK(std::abs(d.imag()) <= 1.5 * step);
      }
    }
  }
}

TEST_CASE("marking h puts the real-axis row in the certified set") {
  GridSpec grid{Complex(0, 0), 15.0, 25};  // odd res: row 12 sits on Im = 0
  ClassifyParams p;
  p.R = 1.0;
  p.N_depth = 6;
  p.K_delay = 3;
  auto f = mark_grid(FunctionSpec::h(), grid, p, 2);
  for (int j = 0; j < grid.resolution; ++j) {
    CHECK(f.at(12, j).certified);
    CHECK(f.at(12, j).delay <= 3);
  }
}

TEST_CASE("marking g leaves the basin band uncertified") {
  GridSpec grid{Complex(0, 0), 15.0, 25};
  ClassifyParams p;
  p.N_depth = 6;
  p.K_delay = 3;
  auto f = mark_grid(FunctionSpec::g(), grid, p, 2);
  for (int j = 0; j < grid.resolution; ++j) {
    Complex z = grid.cell_center(12, j);
    if (std::abs(z.real()) < 2.0) {
      CHECK(!f.at(12, j).certified);
      CHECK(f.at(12, j).attracted);
    }
  }
}

TEST_CASE("depth-0 delay-0 marking is the plain radius inequality") {
  GridSpec grid{Complex(0.03, 0.07), 3.0, 17};  // centers off all symmetry lines
  ClassifyParams p;
  p.R = 1.0;
  p.N_depth = 0;
  p.K_delay = 0;
  auto f = mark_grid(FunctionSpec::h(), grid, p, 2);
  for (int i = 0; i < 17; ++i) {
    for (int j = 0; j < 17; ++j) {
      CHECK(f.at(i, j).certified == (std::abs(grid.cell_center(i, j)) >= 1.0));
    }
  }
}

TEST_CASE("real pipeline produces a verifiable certificate") {
  GridSpec grid{Complex(0, 0), 4 * kPi, 256};
  ClassifyParams p;
  p.K_delay = 8;
  p.N_depth = 12;
  p.mode = ClassifyMode::tower_heuristic;
  auto f = mark_grid(FunctionSpec::h(), grid, p, 4);
  auto cert = find_separating_cycle(f, Complex(0.945, 1.03), 0.03);
  REQUIRE(cert);
  CHECK(cert->winding == 1);
  CHECK(cert->inner_radius >= 0.03);

  // idempotent re-verification at the same and deeper params
  CHECK(verify_certificate(FunctionSpec::h(), *cert, p));
  ClassifyParams deeper = p;
  deeper.N_depth = 14;
  CHECK(verify_certificate(FunctionSpec::h(), *cert, deeper));

  // the same loop cannot certify for g: its vertices fall in g's basin
  CHECK(!verify_certificate(FunctionSpec::g(), *cert, p));

  // truncating the polyline breaks closure
  LoopCertificate broken = *cert;
  broken.vertices.pop_back();
  broken.per_vertex.pop_back();
  CHECK(!verify_certificate(FunctionSpec::h(), broken, p));

  // canonical JSON round-trips byte-exactly
  std::string j1 = certificate_to_json(*cert);
  auto back = certificate_from_json(j1);
  CHECK(certificate_to_json(back) == j1);
  CHECK(back.field_hash == cert->field_hash);

  // regression pin of the canonical serialization
  std::ifstream golden(std::string(ATLAS_GOLDEN_DIR) + "/loop_h_res256.json",
                       std::ios::binary);
  REQUIRE(golden);
  std::stringstream ss;
  ss << golden.rdbuf();
  CHECK(j1 == ss.str());
}

TEST_CASE("negative control: no separating cycle for g around 0") {
  GridSpec grid{Complex(0, 0), 8 * kPi, 192};
  ClassifyParams p;
  p.K_delay = 8;
  p.N_depth = 12;
  p.mode = ClassifyMode::tower_heuristic;
  auto f = mark_grid(FunctionSpec::g(), grid, p, 4);
  CHECK(!find_separating_cycle(f, Complex(0, 0), 0.1));
}

TEST_CASE("field hash is order-sensitive and stable") {
  int res = 16;
  std::vector<char> c(res * res, 1);
  c[5] = 0;
  auto f1 = synthetic(res, 8.0, c);
  auto h1 = field_hash(f1);
  CHECK(h1 == field_hash(f1));
  c[5] = 1;
  c[6] = 0;
  CHECK(field_hash(synthetic(res, 8.0, c)) != h1);
}
