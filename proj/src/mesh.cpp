#include "spl/mesh.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace spl {

namespace {

MeshPtr finalize(Mesh&& m) {
  m.interior.clear();
  for (int i = 0; i < m.n_nodes(); ++i)
    if (!m.boundary[i]) m.interior.push_back(i);
  return std::make_shared<const Mesh>(std::move(m));
}

}  // namespace

MeshPtr build_mesh(const Domain& domain, int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("build_mesh: resolution must be >= 2");

  Mesh m;
  m.domain = domain;
  m.diam = domain.diameter();

  switch (domain.kind) {
    case Domain::Kind::Interval: {
      m.dim = 1;
      int nn = resolution + 1;
      m.nodes.resize(nn, 1);
      for (int i = 0; i < nn; ++i)
        m.nodes(i, 0) = domain.a + (domain.b - domain.a) * i / resolution;
      m.elements.resize(resolution, 2);
      for (int e = 0; e < resolution; ++e) m.elements.row(e) << e, e + 1;
      m.boundary.assign(nn, 0);
      m.boundary.front() = 1;
      m.boundary.back() = 1;
      break;
    }
    case Domain::Kind::Rect: {
      m.dim = 2;
      int n = resolution, nn = (n + 1) * (n + 1);
      m.nodes.resize(nn, 2);
      m.boundary.assign(nn, 0);
      auto id = [n](int i, int j) { return i * (n + 1) + j; };
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          m.nodes(id(i, j), 0) = domain.ax + (domain.bx - domain.ax) * i / n;
          m.nodes(id(i, j), 1) = domain.ay + (domain.by - domain.ay) * j / n;
          if (i == 0 || j == 0 || i == n || j == n) m.boundary[id(i, j)] = 1;
        }
      m.elements.resize(2 * n * n, 3);
      int e = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          m.elements.row(e++) << id(i, j), id(i + 1, j), id(i + 1, j + 1);
          m.elements.row(e++) << id(i, j), id(i + 1, j + 1), id(i, j + 1);
        }
      break;
    }
    case Domain::Kind::Disk: {
      m.dim = 2;
      int rings = resolution;
      int M = std::max(8, 4 * resolution);  // angular count, shared by all rings
      int nn = 1 + rings * M;
      m.nodes.resize(nn, 2);
      m.boundary.assign(nn, 0);
      m.nodes.row(0) << domain.center.x(), domain.center.y();
      auto id = [M](int ring, int j) { return 1 + (ring - 1) * M + (j % M); };
      for (int ring = 1; ring <= rings; ++ring) {
        double r = domain.radius * ring / rings;
        for (int j = 0; j < M; ++j) {
          double th = 2.0 * M_PI * j / M;
          m.nodes(id(ring, j), 0) = domain.center.x() + r * std::cos(th);
          m.nodes(id(ring, j), 1) = domain.center.y() + r * std::sin(th);
          if (ring == rings) m.boundary[id(ring, j)] = 1;
        }
      }
      std::vector<int> tris;
      for (int j = 0; j < M; ++j) {  // center fan
        tris.push_back(0);
        tris.push_back(id(1, j));
        tris.push_back(id(1, j + 1));
      }
      for (int ring = 1; ring < rings; ++ring)
        for (int j = 0; j < M; ++j) {
          tris.push_back(id(ring, j));
          tris.push_back(id(ring + 1, j));
          tris.push_back(id(ring + 1, j + 1));
          tris.push_back(id(ring, j));
          tris.push_back(id(ring + 1, j + 1));
          tris.push_back(id(ring, j + 1));
        }
      m.elements.resize(tris.size() / 3, 3);
      for (size_t t = 0; t < tris.size() / 3; ++t)
        m.elements.row(t) << tris[3 * t], tris[3 * t + 1], tris[3 * t + 2];
      break;
    }
    case Domain::Kind::Ball:
      throw std::invalid_argument("build_mesh: unsupported domain kind");
  }
  return finalize(std::move(m));
}

Field Field::zeros(MeshPtr m) {
  Field f;
  f.mesh = std::move(m);
  f.values = Eigen::VectorXd::Zero(f.mesh->n_nodes());
  return f;
}

void Field::enforce_zero_boundary() {
  for (int i = 0; i < mesh->n_nodes(); ++i)
    if (mesh->boundary[i]) values[i] = 0.0;
}

double Field::min_interior() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i : mesh->interior) m = std::min(m, values[i]);
  return m;
}

MeshPtr refine(const Mesh& mesh) {
  Mesh fine;
  fine.dim = mesh.dim;
  fine.domain = mesh.domain;
  fine.diam = mesh.diam;

  std::map<std::pair<int, int>, int> edge_mid;
  std::vector<Eigen::VectorXd> new_nodes;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    int idx = mesh.n_nodes() + static_cast<int>(new_nodes.size());
    new_nodes.push_back(0.5 * (mesh.nodes.row(a) + mesh.nodes.row(b)).transpose());
    edge_mid.emplace(key, idx);
    return idx;
  };

  std::vector<int> elems;
  if (mesh.dim == 1) {
    for (int e = 0; e < mesh.n_elems(); ++e) {
      int a = mesh.elements(e, 0), b = mesh.elements(e, 1);
      int c = midpoint(a, b);
      elems.insert(elems.end(), {a, c, c, b});
    }
  } else {
    for (int e = 0; e < mesh.n_elems(); ++e) {
      int a = mesh.elements(e, 0), b = mesh.elements(e, 1), c = mesh.elements(e, 2);
      int ab = midpoint(a, b), bc = midpoint(b, c), ac = midpoint(a, c);
      elems.insert(elems.end(), {a, ab, ac, ab, b, bc, ac, bc, c, ab, bc, ac});
    }
  }

  int nn = mesh.n_nodes() + static_cast<int>(new_nodes.size());
  fine.nodes.resize(nn, mesh.dim);
  fine.nodes.topRows(mesh.n_nodes()) = mesh.nodes;
  for (size_t i = 0; i < new_nodes.size(); ++i)
    fine.nodes.row(mesh.n_nodes() + i) = new_nodes[i].transpose();

  int nv = mesh.dim + 1;
  fine.elements.resize(elems.size() / nv, nv);
  for (size_t t = 0; t < elems.size() / nv; ++t)
    for (int k = 0; k < nv; ++k) fine.elements(t, k) = elems[t * nv + k];

  // midpoints of boundary edges are boundary nodes
  fine.boundary.assign(nn, 0);
  for (int i = 0; i < mesh.n_nodes(); ++i) fine.boundary[i] = mesh.boundary[i];
  for (const auto& [key, idx] : edge_mid)
    if (mesh.boundary[key.first] && mesh.boundary[key.second]) {
      if (mesh.dim == 1) continue;  // 1D has no boundary edges
      fine.boundary[idx] = 1;
    }
  return finalize(std::move(fine));
}

Field interpolate_refined(const Field& coarse, MeshPtr fine) {
  const Mesh& cm = *coarse.mesh;
  Field out = Field::zeros(std::move(fine));
  out.zero_boundary = coarse.zero_boundary;
  const Mesh& fm = *out.mesh;

  if (cm.dim == 1) {
    for (int i = 0; i < fm.n_nodes(); ++i) {
      double x = fm.nodes(i, 0);
      // locate segment by scan (nodes of build_mesh intervals are sorted)
      int seg = -1;
      for (int e = 0; e < cm.n_elems(); ++e) {
        double a = cm.nodes(cm.elements(e, 0), 0), b = cm.nodes(cm.elements(e, 1), 0);
        if (x >= std::min(a, b) - 1e-12 && x <= std::max(a, b) + 1e-12) {
          seg = e;
          break;
        }
      }
      if (seg < 0) throw std::runtime_error("interpolate_refined: node outside mesh");
      double a = cm.nodes(cm.elements(seg, 0), 0), b = cm.nodes(cm.elements(seg, 1), 0);
      double t = (x - a) / (b - a);
      out.values[i] = (1 - t) * coarse.values[cm.elements(seg, 0)] +
                      t * coarse.values[cm.elements(seg, 1)];
    }
    return out;
  }

  for (int i = 0; i < fm.n_nodes(); ++i) {
    double x = fm.nodes(i, 0), y = fm.nodes(i, 1);
    bool found = false;
    for (int e = 0; e < cm.n_elems() && !found; ++e) {
      int a = cm.elements(e, 0), b = cm.elements(e, 1), c = cm.elements(e, 2);
      double x1 = cm.nodes(a, 0), y1 = cm.nodes(a, 1);
      double x2 = cm.nodes(b, 0), y2 = cm.nodes(b, 1);
      double x3 = cm.nodes(c, 0), y3 = cm.nodes(c, 1);
      double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
      double l2 = ((x - x1) * (y3 - y1) - (x3 - x1) * (y - y1)) / det;
      double l3 = ((x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)) / det;
      double l1 = 1.0 - l2 - l3;
      if (l1 >= -1e-10 && l2 >= -1e-10 && l3 >= -1e-10) {
        out.values[i] =
            l1 * coarse.values[a] + l2 * coarse.values[b] + l3 * coarse.values[c];
        found = true;
      }
    }
    if (!found) throw std::runtime_error("interpolate_refined: node outside mesh");
  }
  return out;
}

}  // namespace spl
