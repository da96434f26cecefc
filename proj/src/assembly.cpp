#include "fosls/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fosls {

OperatorCoefficients operator_coefficients(double epsilon, double k, bool rescaled) {
  const double se = std::sqrt(epsilon);
  if (rescaled) {
    // w = eps^{-1/2} w~ substituted into the unscaled rows.
    return {se, 1.0, se, std::pow(epsilon, 0.5 * (k - 1.0))};
  }
  return {se, se, epsilon, std::pow(epsilon, 0.5 * k)};
}

namespace {

enum class Form { system, norm };

constexpr int kSystemComponents = 4;
constexpr int kNormComponents = 7;

// Fill residual (system) or norm rows for every local basis vector.
// rows[c * n3 + i] is component c of basis vector i, local index i = field * n + a.
void fill_rows(Form form, const OperatorCoefficients& c, double b, int n, const double* phi,
               const double* gx, const double* gy, double* rows) {
  const int n3 = kFieldCount * n;
  const double sb = std::sqrt(b);
  if (form == Form::system) {
    std::fill(rows, rows + kSystemComponents * n3, 0.0);
    double* r1x = rows;
    double* r1y = rows + n3;
    double* r2 = rows + 2 * n3;
    double* r3 = rows + 3 * n3;
    const double div = c.div / sb;
    for (int a = 0; a < n; ++a) {
      // u
      r1x[a] = -c.grad_u * gx[a];
      r1y[a] = -c.grad_u * gy[a];
      r2[a] = sb * phi[a];
      // w1
      r1x[n + a] = c.flux * phi[a];
      r2[n + a] = -div * gx[a];
      r3[n + a] = -c.curl * gy[a];
      // w2
      r1y[2 * n + a] = c.flux * phi[a];
      r2[2 * n + a] = -div * gy[a];
      r3[2 * n + a] = c.curl * gx[a];
    }
  } else {
    std::fill(rows, rows + kNormComponents * n3, 0.0);
    for (int a = 0; a < n; ++a) {
      rows[0 * n3 + a] = phi[a];
      rows[1 * n3 + a] = c.grad_u * gx[a];
      rows[2 * n3 + a] = c.grad_u * gy[a];
      rows[3 * n3 + n + a] = c.flux * phi[a];
      rows[4 * n3 + 2 * n + a] = c.flux * phi[a];
      rows[5 * n3 + n + a] = c.div * gx[a];
      rows[5 * n3 + 2 * n + a] = c.div * gy[a];
      rows[6 * n3 + n + a] = -c.curl * gy[a];
      rows[6 * n3 + 2 * n + a] = c.curl * gx[a];
    }
  }
}

struct Context {
  const FoslsOperatorSpec& spec;
  Form form;
  OperatorCoefficients coef;
  QuadratureRule rule;
  BasisTable table;
  int n;   // local basis functions per field
  int n3;  // local unknowns
  int components;
};

Context make_context(const FoslsOperatorSpec& spec, Form form) {
  QuadratureRule rule = gauss_rule(spec.quadrature_points());
  BasisTable table = tabulate(spec.space.basis(), rule);
  const int n = spec.space.n_local();
  return {spec,
          form,
          operator_coefficients(spec.problem.epsilon, spec.k, spec.rescaled),
          std::move(rule),
          std::move(table),
          n,
          kFieldCount * n,
          form == Form::system ? kSystemComponents : kNormComponents};
}

struct Workspace {
  std::vector<double> phi, gx, gy, rows, matrix, load;
  std::vector<int> nodes, globals;

  explicit Workspace(const Context& ctx)
      : phi(ctx.n), gx(ctx.n), gy(ctx.n), rows(static_cast<std::size_t>(ctx.components * ctx.n3)),
        matrix(static_cast<std::size_t>(ctx.n3 * ctx.n3)), load(static_cast<std::size_t>(ctx.n3)),
        nodes(ctx.n), globals(ctx.n3) {}
};

void element_matrix(const Context& ctx, int element, Workspace& ws) {
  const FeSpace& space = ctx.spec.space;
  const ProblemSpec& problem = ctx.spec.problem;
  const ElementMap map = push_forward(space.mesh().rect(element));
  const int n = ctx.n, n3 = ctx.n3;

  std::fill(ws.matrix.begin(), ws.matrix.end(), 0.0);
  std::fill(ws.load.begin(), ws.load.end(), 0.0);

  for (int q = 0; q < ctx.table.n_points; ++q) {
    const Point2 x = map.to_physical(ctx.rule.points[q]);
    const double wt = ctx.rule.weights[q] * map.measure * beta_eval(ctx.spec.weight, x);
    const double b = ctx.form == Form::system ? problem.reaction(x) : 1.0;
    const std::size_t off = static_cast<std::size_t>(q) * n;
    for (int a = 0; a < n; ++a) {
      ws.phi[a] = ctx.table.value[off + a];
      ws.gx[a] = ctx.table.d_xi[off + a] * map.scale_x;
      ws.gy[a] = ctx.table.d_eta[off + a] * map.scale_y;
    }
    fill_rows(ctx.form, ctx.coef, b, n, ws.phi.data(), ws.gx.data(), ws.gy.data(), ws.rows.data());

    for (int c = 0; c < ctx.components; ++c) {
      const double* rc = ws.rows.data() + static_cast<std::size_t>(c) * n3;
      for (int i = 0; i < n3; ++i) {
        if (rc[i] == 0.0) continue;
        const double wi = wt * rc[i];
        double* krow = ws.matrix.data() + static_cast<std::size_t>(i) * n3;
        for (int j = i; j < n3; ++j) krow[j] += wi * rc[j];
      }
    }
    if (ctx.form == Form::system) {
      const double g = wt * problem.source(x) / std::sqrt(b);
      const double* r2 = ws.rows.data() + 2 * static_cast<std::size_t>(n3);
      for (int i = 0; i < n3; ++i) ws.load[i] += g * r2[i];
    }
  }
  for (int i = 0; i < n3; ++i) {
    for (int j = 0; j < i; ++j) ws.matrix[i * n3 + j] = ws.matrix[j * n3 + i];
  }

  space.element_nodes(element, ws.nodes);
  for (int f = 0; f < kFieldCount; ++f) {
    const int off = space.field_offset(static_cast<Field>(f));
    for (int a = 0; a < n; ++a) ws.globals[f * n + a] = off + ws.nodes[a];
  }
}

void scatter(const Workspace& ws, int n3, SparseSymMatrix& a, std::vector<double>* rhs) {
  auto& vals = a.values();
  for (int i = 0; i < n3; ++i) {
    const int gi = ws.globals[i];
    const double* krow = ws.matrix.data() + static_cast<std::size_t>(i) * n3;
    for (int j = 0; j < n3; ++j) {
      vals[static_cast<std::size_t>(a.find(gi, ws.globals[j]))] += krow[j];
    }
    if (rhs) (*rhs)[static_cast<std::size_t>(gi)] += ws.load[i];
  }
}

void assemble(const FoslsOperatorSpec& spec, Form form, Execution exec, SparseSymMatrix& a,
              std::vector<double>* rhs) {
  const Context ctx = make_context(spec, form);
  const TensorMesh2D& mesh = spec.space.mesh();

  if (exec == Execution::serial) {
    Workspace ws(ctx);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_matrix(ctx, e, ws);
      scatter(ws, ctx.n3, a, rhs);
    }
    return;
  }

  // Elements of one colour share no DOFs, so their scatters never collide.
  std::array<std::vector<int>, 4> colours;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto [i, j] = mesh.cell(e);
    colours[static_cast<std::size_t>((i % 2) + 2 * (j % 2))].push_back(e);
  }
  for (const auto& list : colours) {
    const long count = static_cast<long>(list.size());
#pragma omp parallel
    {
      Workspace ws(ctx);
#pragma omp for schedule(static)
      for (long k = 0; k < count; ++k) {
        element_matrix(ctx, list[static_cast<std::size_t>(k)], ws);
        scatter(ws, ctx.n3, a, rhs);
      }
    }
  }
}

void check_spec(const FoslsOperatorSpec& spec) {
  if (spec.problem.epsilon != spec.weight.epsilon) {
    throw std::invalid_argument("operator spec: problem and weight disagree on epsilon");
  }
  if (!spec.problem.reaction || !spec.problem.source) {
    throw std::invalid_argument("operator spec: problem lacks reaction or source");
  }
}

} // namespace

std::vector<ResidualRow> local_residual_rows(const FoslsOperatorSpec& spec, int element,
                                             const Point2& xi) {
  check_spec(spec);
  const FeSpace& space = spec.space;
  const ElementMap map = push_forward(space.mesh().rect(element));
  const BasisEval ev = space.basis().eval(xi);
  const int n = space.n_local();
  std::vector<double> gx(n), gy(n);
  for (int a = 0; a < n; ++a) {
    const Point2 g = map.gradient(ev.gradients[a]);
    gx[a] = g[0];
    gy[a] = g[1];
  }
  const double b = spec.problem.reaction(map.to_physical(xi));
  const int n3 = kFieldCount * n;
  std::vector<double> rows(static_cast<std::size_t>(kSystemComponents * n3));
  fill_rows(Form::system, operator_coefficients(spec.problem.epsilon, spec.k, spec.rescaled), b, n,
            ev.values.data(), gx.data(), gy.data(), rows.data());
  std::vector<ResidualRow> out(static_cast<std::size_t>(n3));
  for (int i = 0; i < n3; ++i) {
    for (int c = 0; c < kSystemComponents; ++c) out[i][c] = rows[c * n3 + i];
  }
  return out;
}

SparseSymMatrix make_pattern(const FeSpace& space) {
  const int p = space.degree();
  const int nx = space.nodes_x(), ny = space.nodes_y();
  const int ex = space.mesh().nx(), ey = space.mesh().ny();
  const int per = space.n_per_field();

  // Node range [lo, hi] coupled to node I along one axis.
  auto range = [p](int I, int elements) {
    const int first = I == 0 ? 0 : (I - 1) / p;
    const int last = std::min(I / p, elements - 1);
    return std::pair<int, int>{p * first, p * last + p};
  };

  std::vector<int> ptr{0};
  std::vector<int> cols;
  std::vector<int> row_cols;
  for (int f = 0; f < kFieldCount; ++f) {
    for (int J = 0; J < ny; ++J) {
      const auto [jlo, jhi] = range(J, ey);
      for (int I = 0; I < nx; ++I) {
        const auto [ilo, ihi] = range(I, ex);
        for (int g = 0; g < kFieldCount; ++g) {
          for (int J2 = jlo; J2 <= jhi; ++J2) {
            for (int I2 = ilo; I2 <= ihi; ++I2) cols.push_back(g * per + space.node_index(I2, J2));
          }
        }
        ptr.push_back(static_cast<int>(cols.size()));
      }
    }
  }
  return SparseSymMatrix(space.n_total(), std::move(ptr), std::move(cols));
}

AssembledSystem assemble_system(const FoslsOperatorSpec& spec, bool eliminate, Execution exec) {
  check_spec(spec);
  AssembledSystem sys{make_pattern(spec.space),
                      std::vector<double>(static_cast<std::size_t>(spec.space.n_total()), 0.0)};
  assemble(spec, Form::system, exec, sys.matrix, &sys.rhs);
  if (eliminate) apply_dirichlet(sys.matrix, sys.rhs, spec.space.boundary_dofs());
  return sys;
}

SparseSymMatrix assemble_norm_gram(const FoslsOperatorSpec& spec, bool eliminate, Execution exec) {
  check_spec(spec);
  SparseSymMatrix m = make_pattern(spec.space);
  assemble(spec, Form::norm, exec, m, nullptr);
  if (eliminate) apply_dirichlet(m, spec.space.boundary_dofs());
  return m;
}

void apply_dirichlet(SparseSymMatrix& a, std::span<double> rhs, std::span<const int> boundary) {
  const int n = a.dimension();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int b : boundary) {
    if (b < 0 || b >= n) throw std::out_of_range("apply_dirichlet: boundary index out of range");
    fixed[static_cast<std::size_t>(b)] = 1;
  }
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  auto& val = a.values();
  for (int i = 0; i < n; ++i) {
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
      if (fixed[i] || fixed[col[k]]) val[k] = (i == col[k]) ? 1.0 : 0.0;
    }
  }
  if (!rhs.empty()) {
    for (int b : boundary) rhs[static_cast<std::size_t>(b)] = 0.0;
  }
}

void apply_dirichlet(SparseSymMatrix& a, std::span<const int> boundary) {
  apply_dirichlet(a, std::span<double>{}, boundary);
}

SystemField interpolate_exact(const FoslsOperatorSpec& spec) {
  const FeSpace& space = spec.space;
  const int per = space.n_per_field();
  SystemField field{std::vector<double>(static_cast<std::size_t>(space.n_total()))};
  for (int k = 0; k < per; ++k) {
    const ExactFields ex = eval_exact_fields(spec.problem, space.node_coordinate(k), spec.rescaled);
    field.coefficients[k] = ex.u;
    field.coefficients[per + k] = ex.flux[0];
    field.coefficients[2 * per + k] = ex.flux[1];
  }
  // Boundary values of u are exactly zero for a homogeneous Dirichlet problem.
  for (int b : space.boundary_dofs()) field.coefficients[b] = 0.0;
  return field;
}

double least_squares_functional(const FoslsOperatorSpec& spec, std::span<const double> field) {
  check_spec(spec);
  const FeSpace& space = spec.space;
  const OperatorCoefficients c = operator_coefficients(spec.problem.epsilon, spec.k, spec.rescaled);
  const QuadratureRule rule = gauss_rule(spec.quadrature_points());
  const int n = space.n_local();
  const int per = space.n_per_field();
  std::vector<int> nodes(n);
  double total = 0.0;
  for (int e = 0; e < space.mesh().n_elements(); ++e) {
    const ElementMap map = push_forward(space.mesh().rect(e));
    space.element_nodes(e, nodes);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const BasisEval ev = space.basis().eval(rule.points[q]);
      const Point2 x = map.to_physical(rule.points[q]);
      double u = 0, ux = 0, uy = 0, w1 = 0, w2 = 0, w1x = 0, w1y = 0, w2x = 0, w2y = 0;
      for (int a = 0; a < n; ++a) {
        const Point2 g = map.gradient(ev.gradients[a]);
        const double cu = field[nodes[a]];
        const double c1 = field[per + nodes[a]];
        const double c2 = field[2 * per + nodes[a]];
        u += cu * ev.values[a];
        ux += cu * g[0];
        uy += cu * g[1];
        w1 += c1 * ev.values[a];
        w2 += c2 * ev.values[a];
        w1x += c1 * g[0];
        w1y += c1 * g[1];
        w2x += c2 * g[0];
        w2y += c2 * g[1];
      }
      const double b = spec.problem.reaction(x);
      const double r1x = c.flux * w1 - c.grad_u * ux;
      const double r1y = c.flux * w2 - c.grad_u * uy;
      const double r2 = -c.div / std::sqrt(b) * (w1x + w2y) + std::sqrt(b) * u -
                        spec.problem.source(x) / std::sqrt(b);
      const double r3 = c.curl * (w2x - w1y);
      total += rule.weights[q] * map.measure * beta_eval(spec.weight, x) *
               (r1x * r1x + r1y * r1y + r2 * r2 + r3 * r3);
    }
  }
  return total;
}

} // namespace fosls
