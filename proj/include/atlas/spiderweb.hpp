#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atlas/classify.hpp"
#include "atlas/dynamics.hpp"

namespace atlas {

/// Square sampling grid. Cells are indexed row-major; cell (i, j) has
/// center offset (-S + (j + 0.5) * step, -S + (i + 0.5) * step) from the
/// grid center, step = 2S / resolution, so row index grows with Im.
struct GridSpec {
  Complex center{0.0, 0.0};
  double half_width = 0.0;  // S
  int resolution = 0;       // cells per side, >= 16

  double step() const { return 2.0 * half_width / resolution; }
  Complex cell_center(int i, int j) const {
    return center + Complex(-half_width + (j + 0.5) * step(),
                            -half_width + (i + 0.5) * step());
  }
  bool contains(Complex z) const {
    return std::abs(z.real() - center.real()) <= half_width &&
           std::abs(z.imag() - center.imag()) <= half_width;
  }
};

/// Per-cell summary of a classification verdict.
struct CellMark {
  bool certified = false;  // true iff FastEscaping
  bool attracted = false;
  int delay = -1;
  int depth = -1;
  int steps = -1;  // convergence steps when attracted
};

struct MarkedField {
  GridSpec grid;
  ClassifyParams params;
  FunctionSpec function;
  std::vector<CellMark> cells;  // row-major, size res * res

  const CellMark& at(int i, int j) const {
    return cells[static_cast<size_t>(i) * grid.resolution + j];
  }
  CellMark& at(int i, int j) {
    return cells[static_cast<size_t>(i) * grid.resolution + j];
  }
};

/// FNV-1a 64 over the certified/delay bytes of the field, row-major.
uint64_t field_hash(const MarkedField& field);

/// classify() at every cell center; data-parallel over rows.
MarkedField mark_grid(const FunctionSpec& f, const GridSpec& grid,
                      const ClassifyParams& params, int threads = 0);

struct VertexVerdict {
  int delay;
  int depth;
  ClassifyMode mode;
};

/// Closed polyline of certified cell centers enclosing a basepoint.
struct LoopCertificate {
  FunctionSpec function;
  ClassifyParams params;
  GridSpec grid;
  Complex basepoint;
  std::vector<Complex> vertices;  // closed: first == last
  std::vector<VertexVerdict> per_vertex;  // one per vertex incl. repeat
  int winding = 0;
  double inner_radius = 0.0;  // min |v - basepoint|
  uint64_t field_hash = 0;
};

/// Sum of signed angle increments / 2pi, rounded; residual must be < 0.1.
/// Throws std::invalid_argument if the point lies on the polyline.
int winding_number(const std::vector<Complex>& polyline, Complex point);

/// Outer boundary of the basepoint's 4-connected uncertified component,
/// traced as an 8-connected cycle of certified cells. nullopt when the
/// component reaches the grid boundary or the loop hugs closer than
/// min_radius. Throws std::invalid_argument if the basepoint's own cell is
/// certified (pick a basepoint the certificate can separate).
std::optional<LoopCertificate> find_separating_cycle(const MarkedField& field,
                                                     Complex basepoint,
                                                     double min_radius);

/// Independent re-check: closure, 8-adjacency on the certificate's own
/// grid, winding 1, and re-classification of every vertex at `stricter`.
bool verify_certificate(const FunctionSpec& f, const LoopCertificate& cert,
                        const ClassifyParams& stricter);

/// Canonical JSON: keys sorted, floats as shortest-exact %.17g, LF ending.
std::string certificate_to_json(const LoopCertificate& cert);
LoopCertificate certificate_from_json(const std::string& text);

uint64_t fnv1a64(const void* data, size_t n);

}  // namespace atlas
