#include "atlas/spiderweb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <stdexcept>

#include "atlas/parallel.hpp"
#include "json.hpp"

namespace atlas {

uint64_t fnv1a64(const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t field_hash(const MarkedField& field) {
  std::vector<unsigned char> bytes;
  bytes.reserve(field.cells.size() * 2);
  for (const auto& c : field.cells) {
    bytes.push_back(c.certified ? 1 : 0);
    bytes.push_back(static_cast<unsigned char>(
        c.certified ? (c.delay & 0xff) : (c.attracted ? 0xfe : 0xff)));
  }
  return fnv1a64(bytes.data(), bytes.size());
}

MarkedField mark_grid(const FunctionSpec& f, const GridSpec& grid,
                      const ClassifyParams& params, int threads) {
  if (grid.resolution < 1 || !(grid.half_width > 0.0)) {
    throw std::invalid_argument("mark_grid: invalid grid");
  }
  MarkedField field;
  field.grid = grid;
  field.params = params;
  field.function = f;
  field.cells.resize(static_cast<size_t>(grid.resolution) * grid.resolution);

  Classifier clf(f, params);
  parallel_for(grid.resolution, threads, [&](long i) {
    for (int j = 0; j < grid.resolution; ++j) {
      auto v = clf.classify(grid.cell_center(static_cast<int>(i), j));
      CellMark m;
      if (const auto* fe = std::get_if<FastEscaping>(&v.status)) {
        m.certified = true;
        m.delay = fe->delay;
        m.depth = fe->depth;
      } else if (const auto* at = std::get_if<Attracted>(&v.status)) {
        m.attracted = true;
        m.steps = at->steps;
      }
      field.at(static_cast<int>(i), j) = m;
    }
  });
  return field;
}

int winding_number(const std::vector<Complex>& polyline, Complex point) {
  if (polyline.size() < 2) {
    throw std::invalid_argument("winding_number: degenerate polyline");
  }
  double total = 0.0;
  for (size_t k = 0; k + 1 < polyline.size(); ++k) {
    Complex a = polyline[k] - point;
    Complex b = polyline[k + 1] - point;
    if (std::abs(a) == 0.0 || std::abs(b) == 0.0) {
      throw std::invalid_argument("winding_number: point on polyline");
    }
    total += std::atan2(a.real() * b.imag() - a.imag() * b.real(),
                        a.real() * b.real() + a.imag() * b.imag());
  }
  double turns = total / (2.0 * std::acos(-1.0));
  long rounded = std::lround(turns);
  if (std::abs(turns - rounded) >= 0.1) {
    throw std::invalid_argument("winding_number: residual too large");
  }
  return static_cast<int>(rounded);
}

namespace {

// Crack-following around the 4-connected component `in`: walk the lattice
// edges of the component boundary keeping the component on the right, and
// record the outside cell across each edge. Those cells are 4-adjacent to
// the component, hence certified, and consecutive ones are 8-adjacent.
// Directions: 0 = +j (east), 1 = +i (north in Im), 2 = -j, 3 = -i.
struct Tracer {
  int res;
  const std::vector<char>& in;  // 1 iff cell in component

  bool inside(int i, int j) const {
    return i >= 0 && j >= 0 && i < res && j < res &&
           in[static_cast<size_t>(i) * res + j];
  }
  // Cells to the right/left of the directed edge from corner (ci, cj).
  void side_cells(int ci, int cj, int d, int out[4]) const {
    switch (d) {
      case 0:  // right = (ci-1, cj), left = (ci, cj)
        out[0] = ci - 1; out[1] = cj; out[2] = ci; out[3] = cj; break;
      case 1:  // heading +i: right = (ci, cj), left = (ci, cj-1)
        out[0] = ci; out[1] = cj; out[2] = ci; out[3] = cj - 1; break;
      case 2:  // heading -j: right = (ci, cj-1), left = (ci-1, cj-1)
        out[0] = ci; out[1] = cj - 1; out[2] = ci - 1; out[3] = cj - 1; break;
      default:  // heading -i: right = (ci-1, cj-1), left = (ci-1, cj)
        out[0] = ci - 1; out[1] = cj - 1; out[2] = ci - 1; out[3] = cj;
    }
  }
  bool edge_ok(int ci, int cj, int d) const {
    int s[4];
    side_cells(ci, cj, d, s);
    return inside(s[0], s[1]) && !inside(s[2], s[3]);
  }
};

}  // namespace

std::optional<LoopCertificate> find_separating_cycle(const MarkedField& field,
                                                     Complex basepoint,
                                                     double min_radius) {
  const GridSpec& g = field.grid;
  const int res = g.resolution;
  if (!g.contains(basepoint)) {
    throw std::invalid_argument("find_separating_cycle: basepoint off-grid");
  }
  double step = g.step();
  int bj = static_cast<int>((basepoint.real() - g.center.real() +
                             g.half_width) / step);
  int bi = static_cast<int>((basepoint.imag() - g.center.imag() +
                             g.half_width) / step);
  bi = std::min(std::max(bi, 0), res - 1);
  bj = std::min(std::max(bj, 0), res - 1);
  if (field.at(bi, bj).certified) {
    throw std::invalid_argument(
        "find_separating_cycle: basepoint cell is certified; the point to "
        "separate must not itself carry a certificate");
  }

  // 4-connected flood fill of uncertified cells from the basepoint cell.
  std::vector<char> in(static_cast<size_t>(res) * res, 0);
  std::deque<std::pair<int, int>> queue;
  in[static_cast<size_t>(bi) * res + bj] = 1;
  queue.emplace_back(bi, bj);
  bool touches_boundary = false;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    if (i == 0 || j == 0 || i == res - 1 || j == res - 1) {
      touches_boundary = true;
    }
    for (int d = 0; d < 4; ++d) {
      int ni = i + di[d], nj = j + dj[d];
      if (ni < 0 || nj < 0 || ni >= res || nj >= res) continue;
      size_t idx = static_cast<size_t>(ni) * res + nj;
      if (in[idx] || field.at(ni, nj).certified) continue;
      in[idx] = 1;
      queue.emplace_back(ni, nj);
    }
  }
  if (touches_boundary) return std::nullopt;

  // Start at the bottom edge (lowest i, then lowest j) heading east; the
  // component is above that edge and the certified outside below it.
  int si = -1, sj = -1;
  for (int i = 0; i < res && si < 0; ++i) {
    for (int j = 0; j < res; ++j) {
      if (in[static_cast<size_t>(i) * res + j]) {
        si = i;
        sj = j;
        break;
      }
    }
  }
  Tracer tr{res, in};
  // The bottom edge of the lowest-then-leftmost component cell, traversed
  // westward, keeps the component on the right with the certified outside
  // on the left -- a valid starting state for the right-hand trace.
  int ci = si, cj = sj + 1, dir = 2;
  if (!tr.edge_ok(ci, cj, dir)) {
    throw std::logic_error("find_separating_cycle: tracer start invalid");
  }
  const int step_i[4] = {0, 1, 0, -1};
  const int step_j[4] = {1, 0, -1, 0};
  std::vector<std::pair<int, int>> outside;
  int ci0 = ci, cj0 = cj, dir0 = dir;
  long guard = 16L * res * res + 16;
  do {
    int s[4];
    tr.side_cells(ci, cj, dir, s);
    if (outside.empty() || outside.back() != std::make_pair(s[2], s[3])) {
      outside.emplace_back(s[2], s[3]);
    }
    ci += step_i[dir];
    cj += step_j[dir];
    // Right-hand rule: prefer turning right, then straight, then left,
    // then back. Exactly one choice is valid at every boundary corner.
    int next = -1;
    for (int turn : {3, 0, 1, 2}) {
      int d = (dir + turn) & 3;
      if (tr.edge_ok(ci, cj, d)) {
        next = d;
        break;
      }
    }
    if (next < 0) throw std::logic_error("find_separating_cycle: trace lost");
    if (next == ((dir + 3) & 3)) {
      // Convex corner: the cell diagonally across from the pivot inside
      // cell belongs to the ring when it is itself certified (it is only
      // 8-adjacent to the component, so that is not automatic).
      tr.side_cells(ci, cj, next, s);
      int xi = 2 * ci - 1 - s[0], xj = 2 * cj - 1 - s[1];
      if (xi >= 0 && xj >= 0 && xi < res && xj < res &&
          field.at(xi, xj).certified &&
          (outside.empty() || outside.back() != std::make_pair(xi, xj))) {
        outside.emplace_back(xi, xj);
      }
    }
    dir = next;
    if (--guard == 0) {
      throw std::logic_error("find_separating_cycle: trace did not close");
    }
  } while (!(ci == ci0 && cj == cj0 && dir == dir0));
  if (outside.size() > 1 && outside.front() == outside.back()) {
    outside.pop_back();
  }
  // The right-hand trace runs clockwise; flip to winding +1.
  std::reverse(outside.begin(), outside.end());

  LoopCertificate cert;
  cert.function = field.function;
  cert.params = field.params;
  cert.grid = g;
  cert.basepoint = basepoint;
  cert.field_hash = atlas::field_hash(field);
  cert.inner_radius = std::numeric_limits<double>::infinity();
  for (auto [i, j] : outside) {
    const CellMark& m = field.at(i, j);
    if (!m.certified) {
      throw std::logic_error("find_separating_cycle: uncertified vertex");
    }
    Complex v = g.cell_center(i, j);
    cert.vertices.push_back(v);
    cert.per_vertex.push_back({m.delay, m.depth, field.params.mode});
    cert.inner_radius = std::min(cert.inner_radius, std::abs(v - basepoint));
  }
  cert.vertices.push_back(cert.vertices.front());
  cert.per_vertex.push_back(cert.per_vertex.front());
  cert.winding = winding_number(cert.vertices, basepoint);
  if (cert.winding != 1 || cert.inner_radius < min_radius) {
    return std::nullopt;
  }
  return cert;
}

bool verify_certificate(const FunctionSpec& f, const LoopCertificate& cert,
                        const ClassifyParams& stricter) {
  const auto& v = cert.vertices;
  if (v.size() < 4 || v.front() != v.back()) return false;
  if (cert.per_vertex.size() != v.size()) return false;
  double step = cert.grid.step();
  for (size_t k = 0; k + 1 < v.size(); ++k) {
    Complex d = v[k + 1] - v[k];
    if (std::abs(d) == 0.0) return false;
    if (std::abs(d.real()) > 1.5 * step || std::abs(d.imag()) > 1.5 * step) {
      return false;  // not 8-neighbors on the certificate's grid
    }
  }
  int w;
  try {
    w = winding_number(v, cert.basepoint);
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (w != 1) return false;
  Classifier clf(f, stricter);
  for (size_t k = 0; k + 1 < v.size(); ++k) {
    if (!clf.classify(v[k]).fast_escaping()) return false;
  }
  return true;
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Canonical writer: keys already emitted in sorted order by the callers,
// floats always via fmt_double, no whitespace except the final LF.
void write_complex(std::string& out, Complex z) {
  out += "[";
  out += fmt_double(z.real());
  out += ",";
  out += fmt_double(z.imag());
  out += "]";
}

const char* mode_name(ClassifyMode m) {
  return m == ClassifyMode::rigorous_horizon ? "rigorous_horizon"
                                             : "tower_heuristic";
}

}  // namespace

std::string certificate_to_json(const LoopCertificate& cert) {
  std::string o = "{";
  o += "\"basepoint\":";
  write_complex(o, cert.basepoint);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cert.field_hash));
  o += ",\"field_hash\":\"";
  o += hash;
  o += "\",\"function\":{\"lambda\":";
  write_complex(o, cert.function.lambda);
  o += ",\"q\":" + std::to_string(cert.function.q);
  o += "},\"grid\":{\"center\":";
  write_complex(o, cert.grid.center);
  o += ",\"half_width\":" + fmt_double(cert.grid.half_width);
  o += ",\"resolution\":" + std::to_string(cert.grid.resolution);
  o += "},\"inner_radius\":" + fmt_double(cert.inner_radius);
  o += ",\"params\":{\"K_delay\":" + std::to_string(cert.params.K_delay);
  o += ",\"N_depth\":" + std::to_string(cert.params.N_depth);
  o += ",\"R\":" + fmt_double(cert.params.R);
  o += ",\"eps_attract\":" + fmt_double(cert.params.eps_attract);
  o += ",\"maxiter\":" + std::to_string(cert.params.maxiter);
  o += ",\"mode\":\"";
  o += mode_name(cert.params.mode);
  o += "\"},\"per_vertex\":[";
  for (size_t k = 0; k < cert.per_vertex.size(); ++k) {
    if (k) o += ",";
    const auto& pv = cert.per_vertex[k];
    o += "{\"delay\":" + std::to_string(pv.delay);
    o += ",\"depth\":" + std::to_string(pv.depth);
    o += ",\"mode\":\"";
    o += mode_name(pv.mode);
    o += "\"}";
  }
  o += "],\"vertices\":[";
  for (size_t k = 0; k < cert.vertices.size(); ++k) {
    if (k) o += ",";
    write_complex(o, cert.vertices[k]);
  }
  o += "],\"winding\":" + std::to_string(cert.winding);
  o += "}\n";
  return o;
}

LoopCertificate certificate_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LoopCertificate cert;
  cert.basepoint = Complex(j["basepoint"][0], j["basepoint"][1]);
  cert.field_hash = std::stoull(j["field_hash"].get<std::string>(), nullptr, 16);
  cert.function.lambda =
      Complex(j["function"]["lambda"][0], j["function"]["lambda"][1]);
  cert.function.q = j["function"]["q"];
  cert.grid.center = Complex(j["grid"]["center"][0], j["grid"]["center"][1]);
  cert.grid.half_width = j["grid"]["half_width"];
  cert.grid.resolution = j["grid"]["resolution"];
  cert.inner_radius = j["inner_radius"];
  cert.params.K_delay = j["params"]["K_delay"];
  cert.params.N_depth = j["params"]["N_depth"];
  cert.params.R = j["params"]["R"];
  cert.params.eps_attract = j["params"]["eps_attract"];
  cert.params.maxiter = j["params"]["maxiter"];
  cert.params.mode = j["params"]["mode"] == "tower_heuristic"
                         ? ClassifyMode::tower_heuristic
                         : ClassifyMode::rigorous_horizon;
  for (const auto& pv : j["per_vertex"]) {
    cert.per_vertex.push_back(
        {pv["delay"], pv["depth"],
         pv["mode"] == "tower_heuristic" ? ClassifyMode::tower_heuristic
                                         : ClassifyMode::rigorous_horizon});
  }
  for (const auto& v : j["vertices"]) {
    cert.vertices.emplace_back(v[0], v[1]);
  }
  cert.winding = j["winding"];
  return cert;
}

}  // namespace atlas
